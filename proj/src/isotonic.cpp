#include "hysim/isotonic.hpp"

#include <stdexcept>

namespace hysim {

std::vector<double> isotonic_fit(const std::vector<double>& values,
                                 const std::vector<double>& weights, bool increasing) {
  const std::size_t n = values.size();
  if (!weights.empty() && weights.size() != n) {
    throw std::invalid_argument("isotonic_fit: weights and values differ in length");
  }
  struct Block {
    double mean;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(n);
  const double sign = increasing ? 1.0 : -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0)) throw std::invalid_argument("isotonic_fit: weights must be positive");
    blocks.push_back({sign * values[i], w, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const double total = prev.weight + top.weight;
      prev.mean = (prev.mean * prev.weight + top.mean * top.weight) / total;
      prev.weight = total;
      prev.count += top.count;
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (const Block& b : blocks) out.insert(out.end(), b.count, sign * b.mean);
  return out;
}

}  // namespace hysim
