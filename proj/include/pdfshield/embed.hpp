#pragma once

#include <string>
#include <vector>

#include "pdfshield/flate.hpp"

namespace pdfshield {

/// Text embedding provider. One call may embed many texts; every returned
/// vector must have the same dimension.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

/// Deterministic offline embedder: hashed bag-of-words, L2-normalized.
/// Good enough to exercise the gate without a model server.
class HashingEmbedder : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dims = 256) : dims_(dims) {}
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;

private:
    std::size_t dims_;
};

/// Remote provider speaking POST /embed {"texts":[...]} -> {"vectors":[[..]]}.
class HttpEmbedder : public Embedder {
public:
    explicit HttpEmbedder(std::string base_url) : base_url_(std::move(base_url)) {}
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;

private:
    std::string base_url_;
};

}  // namespace pdfshield
