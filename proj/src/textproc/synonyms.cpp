#include <fmt/format.h>

#include "coe/error.hpp"
#include "coe/io.hpp"
#include "coe/textproc.hpp"

namespace coe::text {

SynonymTable SynonymTable::parse(std::string_view content) {
  SynonymTable table;
  std::size_t line_no = 0;
  for (const std::string& line : io::split_lines(content)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw InputError(fmt::format("synonym table line {}: expected 'word<TAB>set_id'", line_no));
    }
    table.add(line.substr(0, tab), line.substr(tab + 1));
  }
  return table;
}

SynonymTable SynonymTable::load(const std::filesystem::path& path) {
  return parse(io::read_file(path));
}

void SynonymTable::add(std::string word, std::string set_id) {
  sets_[lowercase(word)].insert(std::move(set_id));
}

bool SynonymTable::synonyms(const std::string& a, const std::string& b) const {
  auto ia = sets_.find(a);
  auto ib = sets_.find(b);
  if (ia == sets_.end() || ib == sets_.end()) return false;
  for (const std::string& id : ia->second) {
    if (ib->second.count(id) != 0) return true;
  }
  return false;
}

}  // namespace coe::text
