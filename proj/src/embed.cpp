#include "pdfshield/embed.hpp"

#include <cctype>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "pdfshield/errors.hpp"

namespace pdfshield {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::vector<std::vector<double>> HashingEmbedder::embed(
    const std::vector<std::string>& texts) {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        std::vector<double> v(dims_, 0.0);
        std::string tok;
        auto flush = [&] {
            if (tok.empty())
                return;
            std::uint64_t h = fnv1a(tok);
            v[h % dims_] += (h >> 32) % 2 ? 1.0 : -1.0;
            tok.clear();
        };
        for (unsigned char c : text) {
            if (std::isalnum(c))
                tok.push_back(static_cast<char>(std::tolower(c)));
            else
                flush();
        }
        flush();
        double norm = 0.0;
        for (double x : v)
            norm += x * x;
        if (norm == 0.0)
            v[0] = 1.0;  // degenerate input still embeds
        else
            for (double& x : v)
                x /= std::sqrt(norm);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<std::vector<double>> HttpEmbedder::embed(const std::vector<std::string>& texts) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    nlohmann::json body;
    body["texts"] = texts;
    auto res = client.Post("/embed", body.dump(), "application/json");
    if (!res || res->status < 200 || res->status >= 300)
        throw EmbedderUnavailable("embedding provider at " + base_url_ +
                                  (res ? " returned status " + std::to_string(res->status)
                                       : " is unreachable"));
    std::vector<std::vector<double>> out;
    try {
        nlohmann::json j = nlohmann::json::parse(res->body);
        for (const auto& vec : j.at("vectors"))
            out.push_back(vec.get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw EmbedderUnavailable(std::string("malformed embedding response: ") + e.what());
    }
    if (out.size() != texts.size())
        throw EmbedderUnavailable("embedding response count mismatch");
    for (const auto& v : out)
        if (v.size() != out.front().size())
            throw DimensionMismatch("embedding dimensions differ across vectors");
    return out;
}

}  // namespace pdfshield
