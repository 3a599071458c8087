#include <stdexcept>

#include "coe/textproc.hpp"

namespace coe::text {

std::size_t NgramMultiset::count(const Ngram& gram) const {
  auto it = counts_.find(gram);
  return it == counts_.end() ? 0 : it->second;
}

void NgramMultiset::add(Ngram gram, std::size_t times) {
  if (times == 0) return;
  counts_[std::move(gram)] += times;
  total_ += times;
}

NgramMultiset ngrams(std::span<const std::string> tokens, std::size_t n) {
  if (n == 0) throw std::invalid_argument("ngrams: order must be >= 1");
  NgramMultiset out(n);
  if (tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    out.add(NgramMultiset::Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                 tokens.begin() + static_cast<std::ptrdiff_t>(i + n)));
  }
  return out;
}

}  // namespace coe::text
