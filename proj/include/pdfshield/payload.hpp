#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pdfshield/embed.hpp"

namespace pdfshield {

/// Deterministic RNG used everywhere randomness is needed. The bounded draw
/// is pinned here (rejection sampling over mt19937_64) so a fixed seed gives
/// byte-identical artifacts on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    std::size_t below(std::size_t n);

    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

private:
    std::mt19937_64 eng_;
};

/// Flatten payload text for safe serialization inside PDF string syntax:
/// line breaks, tabs and non-breaking spaces become spaces, parentheses are
/// dropped, space runs collapse. Throws EmptyAfterDenoise if nothing is left.
std::string denoise_serialize(const std::string& text);

struct EncodedPayload {
    std::string plaintext;  // denoised source
    std::string hex;        // uppercase hex of BOM + UTF-16BE code units
};

/// UTF-16BE + BOM, uppercase hex. Input must already be denoised UTF-8.
EncodedPayload encode_actual_text(const std::string& denoised);

/// Inverse of encode_actual_text over the byte payload (after hex decoding).
std::string decode_actual_text_bytes(const Bytes& bytes);

/// Jaccard index over unique lowercased, punctuation-stripped tokens.
double lexical_overlap(const std::string& a, const std::string& b);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

/// Cosine similarity of the two texts' embeddings.
double semantic_invariance(const std::string& a, const std::string& b, Embedder& embedder);

struct PayloadVariant {
    std::size_t seed_index = 0;
    std::string text;
    double si = 0.0;
    double lo = 0.0;
    int interval_index = -1;
    bool accepted = false;
    std::string reason;
};

struct MutationConfig {
    double tau = 0.9;
    std::vector<std::pair<double, double>> intervals;  // disjoint subranges of [0,1]

    /// The six intervals used throughout: [0.2,0.3] ... [0.7,0.8].
    static MutationConfig defaults();
};

struct PayloadPool {
    std::string strategy;  // "explicit" | "implicit"
    std::vector<std::string> markers;
    std::vector<std::string> seeds;
    std::vector<PayloadVariant> variants;

    /// Seeds plus accepted variants, in stable id order (seed ids first).
    std::vector<std::string> members() const;
};

/// Gate externally generated candidate variants against the seeds: a
/// candidate joins the pool when its semantic invariance reaches tau and its
/// lexical overlap lands in a free interval slot for its seed. Rejects stay
/// in the result with their reason; at most one variant per (seed, interval).
PayloadPool build_pool(const PayloadPool& input, const MutationConfig& config,
                       Embedder& embedder);

/// m uniform draws: without replacement while m <= pool size, with
/// replacement beyond that.
std::vector<std::size_t> sample_payload_ids(std::size_t pool_size, std::size_t m, Rng& rng);

PayloadPool load_pool_json(const std::string& path);
PayloadPool parse_pool_json(const std::string& text);
std::string pool_to_json(const PayloadPool& pool);

}  // namespace pdfshield
