#pragma once

// Randomised checks of the k-semiring axioms, shared by the unit and
// acceptance suites.

#include <random>
#include <string>
#include <vector>

#include "regdec/semiring.hpp"

namespace axioms {

struct Outcome {
  std::size_t pairs = 0;
  std::size_t failures = 0;
  std::size_t max_pieces = 0;
  std::string first_failure;
};

inline Outcome check(const regdec::Semiring& sr, std::size_t pairs, std::mt19937_64& rng) {
  using regdec::Subset;
  Outcome out;
  auto bad = [&](const std::string& why) {
    if (out.failures++ == 0) out.first_failure = why;
  };
  const auto& space = sr.space();
  if (!sr.contains(space.none())) bad("empty set is not a member");
  if (!sr.contains(space.full())) bad("whole space is not a member");
  for (std::size_t i = 0; i < pairs; ++i) {
    ++out.pairs;
    const Subset s = sr.random_member(rng);
    const Subset t = sr.random_member(rng);
    if (!sr.contains(s) || !sr.contains(t)) {
      bad("random_member produced a non-member");
      continue;
    }
    if (!sr.contains(s & t)) bad("intersection of members is not a member");
    const auto pieces = sr.subtract(s, t);
    out.max_pieces = std::max(out.max_pieces, pieces.size());
    if (pieces.size() > sr.k()) bad("more than k pieces");
    Subset joined(space.size());
    for (std::size_t a = 0; a < pieces.size(); ++a) {
      if (pieces[a].is_empty()) bad("empty piece");
      if (!sr.contains(pieces[a])) bad("piece is not a member");
      if (joined.intersects(pieces[a])) bad("pieces overlap");
      joined |= pieces[a];
    }
    if (joined != (s - t)) bad("pieces do not cover the difference");
  }
  return out;
}

}  // namespace axioms
