#pragma once

#include <functional>
#include <string>
#include <vector>

namespace kwsql {

struct EmbeddingVector {
  std::vector<double> components;
};

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Deterministic hashed bag-of-tokens embedder: tokens are lowercase
// alphanumeric runs, term weight is 1 + ln(tf), bucket = fnv1a64(token) mod
// dimension, L2-normalized when nonzero. A drop-in for an external embedding
// endpoint when offline reproducibility matters.
EmbeddingVector hashed_embedding(const std::string& text, std::size_t dimension);

using EmbedFn = std::function<EmbeddingVector(const std::string&)>;

EmbedFn default_embedder(std::size_t dimension = 256);

} // namespace kwsql
