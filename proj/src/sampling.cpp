#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "bboxlab/experiments.hpp"

namespace bboxlab {

namespace {

constexpr std::array<std::string_view, 4> kDomainNames = {"unit", "disjoint", "overlapping",
                                                          "offtie"};

class BlockStream {
 public:
  BlockStream(std::uint64_t seed, std::uint64_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    engine_.seed(seq);
  }

  // 53 random bits mapped onto [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

Box draw_unit_box(BlockStream& rng) {
  static const double log_lo = std::log(0.1);
  static const double log_hi = std::log(0.6);
  const double cx = rng.uniform();
  const double cy = rng.uniform();
  const double w = std::exp(rng.uniform(log_lo, log_hi));
  const double h = std::exp(rng.uniform(log_lo, log_hi));
  return {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
}

bool off_tie(const BoxPair& pair) {
  const Box& p = pair.pred;
  const Box& g = pair.gt;
  const double diffs[] = {p.x1 - g.x1, p.y1 - g.y1, p.x2 - g.x2, p.y2 - g.y2};
  for (double d : diffs) {
    if (std::abs(d) <= kOffTieMargin) return false;
    if (std::abs(std::abs(d) - kSmoothL1Beta) <= kOffTieMargin) return false;
  }
  const SideTerms t = side_terms_unchecked(pair);
  return std::abs(t.w_min) > kOffTieMargin && std::abs(t.h_min) > kOffTieMargin;
}

bool accepts(SampleDomain domain, const BoxPair& pair) {
  switch (domain) {
    case SampleDomain::Unit: return true;
    case SampleDomain::Disjoint: return intersection_area(pair) == 0.0;
    case SampleDomain::Overlapping: return intersection_area(pair) > 0.0;
    case SampleDomain::OffTie: return off_tie(pair);
  }
  return false;
}

}  // namespace

std::string_view to_string(SampleDomain domain) noexcept {
  return kDomainNames[static_cast<std::size_t>(domain)];
}

SampleDomain parse_sample_domain(std::string_view name) {
  for (std::size_t i = 0; i < kDomainNames.size(); ++i) {
    if (name == kDomainNames[i]) return static_cast<SampleDomain>(i);
  }
  throw std::invalid_argument("unknown sample domain '" + std::string(name) + "'");
}

std::vector<BoxPair> PairSampler::block(std::size_t index) const {
  const std::size_t begin = index * kBlockSize;
  if (begin >= count) return {};
  const std::size_t n = std::min(kBlockSize, count - begin);

  BlockStream rng(seed, index);
  std::vector<BoxPair> out;
  out.reserve(n);
  while (out.size() < n) {
    BoxPair pair;
    pair.pred = draw_unit_box(rng);
    pair.gt = draw_unit_box(rng);
    if (accepts(domain, pair)) out.push_back(pair);
  }
  return out;
}

std::vector<BoxPair> sample_pairs(const PairSampler& sampler) {
  if (sampler.count == 0) throw std::invalid_argument("sample count must be at least 1");
  std::vector<BoxPair> out;
  out.reserve(sampler.count);
  for (std::size_t b = 0; b < sampler.block_count(); ++b) {
    const auto block = sampler.block(b);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

}  // namespace bboxlab
