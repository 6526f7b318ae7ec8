#include "kwsql/embedding.hpp"

#include <cmath>
#include <map>

#include "kwsql/text.hpp"

namespace kwsql {

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  std::size_t n = std::min(a.components.size(), b.components.size());
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.components.size(); ++i)
    na += a.components[i] * a.components[i];
  for (std::size_t i = 0; i < b.components.size(); ++i)
    nb += b.components[i] * b.components[i];
  for (std::size_t i = 0; i < n; ++i) dot += a.components[i] * b.components[i];
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

EmbeddingVector hashed_embedding(const std::string& text,
                                 std::size_t dimension) {
  std::map<std::string, int> counts;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) ++counts[token];
    token.clear();
  };
  for (char c : text) {
    char l = ascii_lower(c);
    if ((l >= 'a' && l <= 'z') || (l >= '0' && l <= '9'))
      token.push_back(l);
    else
      flush();
  }
  flush();

  EmbeddingVector v;
  v.components.assign(dimension, 0.0);
  for (const auto& [tok, tf] : counts) {
    double w = 1.0 + std::log(static_cast<double>(tf));
    v.components[fnv1a64(tok) % dimension] += w;
  }
  double norm = 0.0;
  for (double x : v.components) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v.components) x /= norm;
  }
  return v;
}

EmbedFn default_embedder(std::size_t dimension) {
  return [dimension](const std::string& text) {
    return hashed_embedding(text, dimension);
  };
}

} // namespace kwsql
