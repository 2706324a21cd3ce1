#include "udep/features.hpp"

#include <stdexcept>

#include "udep/rng.hpp"

namespace udep {

namespace {

constexpr uint64_t kHashSeed = 0x7f4a7c15ULL;

// Special field codes; real word/POS ids start at kCodeBase.
constexpr uint64_t kRootCode = 1;
constexpr uint64_t kBoundaryCode = 2;
constexpr uint64_t kUnkPosCode = 3;
constexpr uint64_t kNoSibCode = 4;
constexpr uint64_t kCodeBase = 8;

struct TokenCodes {
  uint64_t word;
  uint64_t pos;
};

class Hasher {
 public:
  explicit Hasher(std::vector<uint32_t>* out) : out_(out) {}

  void emit(uint64_t t, uint64_t a, uint64_t b = 0, uint64_t c = 0, uint64_t d = 0,
            uint64_t conj = 0) {
    uint64_t h = mix64(kHashSeed ^ (t * 0x9e3779b97f4a7c15ULL));
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    h = mix64(h ^ d);
    h = mix64(h ^ conj);
    out_->push_back(static_cast<uint32_t>(h & kFeatureMask));
  }

 private:
  std::vector<uint32_t>* out_;
};

int distance_bucket(int dist) {
  if (dist <= 5) return dist;
  if (dist <= 10) return 6;
  return 7;
}

}  // namespace

void FeatureExtractor::extract(const Sentence& s, const FeaturePart& part,
                               std::vector<uint32_t>* out) const {
  const int n = s.size();
  auto codes = [&](int pos) -> TokenCodes {
    if (pos == 0) return {kRootCode, kRootCode};
    if (pos < 0 || pos > n) return {kBoundaryCode, kBoundaryCode};
    const Token& tok = s.at(pos);
    int pid = vocab_->pos_id(tok.pos);
    return {kCodeBase + static_cast<uint64_t>(vocab_->word_id(tok.norm)),
            pid < 0 ? kUnkPosCode : kCodeBase + static_cast<uint64_t>(pid)};
  };

  const int h = part.head, d = part.dep;
  if (d < 1 || d > n || h < 0 || h > n) throw std::out_of_range("feature part out of range");
  TokenCodes hc = codes(h), dc = codes(d);
  const uint64_t dir = d > h ? 2 : 1;
  const uint64_t bucket = static_cast<uint64_t>(distance_bucket(h > d ? h - d : d - h));
  const uint64_t conj = dir * 16 + bucket;
  Hasher hash(out);

  if (part.kind == PartKind::kArc) {
    // Unigram and bigram templates, each raw and direction/distance-conjoined.
    auto both = [&](uint64_t t, uint64_t a, uint64_t b = 0, uint64_t c = 0, uint64_t e = 0) {
      hash.emit(t, a, b, c, e, 0);
      hash.emit(t + 100, a, b, c, e, conj);
    };
    both(1, hc.pos);
    both(2, hc.word);
    both(3, hc.pos, hc.word);
    both(4, dc.pos);
    both(5, dc.word);
    both(6, dc.pos, dc.word);
    both(7, hc.pos, dc.pos);
    both(8, hc.word, dc.word);
    both(9, hc.pos, dc.word);
    both(10, hc.word, dc.pos);
    both(11, hc.pos, hc.word, dc.pos);
    both(12, hc.pos, dc.pos, dc.word);
    both(13, hc.pos, hc.word, dc.pos, dc.word);
    // POS of every token strictly between head and dependent.
    int lo = std::min(h, d), hi = std::max(h, d);
    for (int m = lo + 1; m < hi; ++m) {
      both(14, hc.pos, codes(m).pos, dc.pos);
    }
    // Surrounding-tag templates.
    TokenCodes hn = codes(h + 1), hp = codes(h - 1);
    TokenCodes dn = codes(d + 1), dp = codes(d - 1);
    both(15, hc.pos, hn.pos, dp.pos, dc.pos);
    both(16, hp.pos, hc.pos, dp.pos, dc.pos);
    both(17, hc.pos, hn.pos, dc.pos, dn.pos);
    both(18, hp.pos, hc.pos, dc.pos, dn.pos);
  } else {
    uint64_t sp = kNoSibCode;
    if (part.sib >= 0) {
      if (part.sib < 1 || part.sib > n) throw std::out_of_range("sibling out of range");
      sp = codes(part.sib).pos;
    }
    auto both = [&](uint64_t t, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
      hash.emit(t, a, b, c, 0, 0);
      hash.emit(t + 100, a, b, c, 0, conj);
    };
    both(20, hc.pos, dc.pos, sp);
    both(21, dc.pos, sp);
    both(22, hc.pos, sp);
  }
}

std::vector<uint32_t> FeatureExtractor::extract(const Sentence& s,
                                                const FeaturePart& part) const {
  std::vector<uint32_t> out;
  out.reserve(48);
  extract(s, part, &out);
  return out;
}

std::vector<FeaturePart> tree_parts(const DepTree& t) {
  const int n = t.size();
  std::vector<FeaturePart> parts;
  parts.reserve(2 * n);
  for (int d = 1; d <= n; ++d) {
    int h = t.head(d);
    parts.push_back(FeaturePart::arc(h, d));
    // Adjacent inner sibling: the head's previous dependent on the same side,
    // i.e. the nearest same-head token strictly between h and d. ROOT arcs
    // never have one.
    int sib = -1;
    if (d < h) {
      for (int m = d + 1; m < h; ++m) {
        if (t.head(m) == h) {
          sib = m;
          break;
        }
      }
    } else if (h != 0) {
      for (int m = d - 1; m > h; --m) {
        if (t.head(m) == h) {
          sib = m;
          break;
        }
      }
    }
    parts.push_back(FeaturePart::sibling(h, d, sib));
  }
  return parts;
}

}  // namespace udep
