#include "pdfshield/payload.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pdfshield/errors.hpp"

namespace pdfshield {

std::size_t Rng::below(std::size_t n) {
    if (n == 0)
        throw Error("Rng::below(0)");
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = next();
    } while (v >= limit);
    return static_cast<std::size_t>(v % n);
}

std::string denoise_serialize(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        unsigned char c = text[i];
        if (c == '\n' || c == '\r' || c == '\t' || c == '\f' || c == '\v') {
            out.push_back(' ');
        } else if (c == 0xc2 && i + 1 < text.size() &&
                   static_cast<unsigned char>(text[i + 1]) == 0xa0) {
            out.push_back(' ');  // U+00A0 no-break space
            ++i;
        } else if (c == '(' || c == ')') {
            // dropped: keeps payloads inert inside string delimiters
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
    // collapse runs and trim
    std::string collapsed;
    collapsed.reserve(out.size());
    bool prev_space = true;
    for (char c : out) {
        if (c == ' ') {
            if (!prev_space)
                collapsed.push_back(' ');
            prev_space = true;
        } else {
            collapsed.push_back(c);
            prev_space = false;
        }
    }
    while (!collapsed.empty() && collapsed.back() == ' ')
        collapsed.pop_back();
    if (collapsed.empty())
        throw EmptyAfterDenoise("payload reduced to nothing");
    return collapsed;
}

namespace {

// Minimal UTF-8 decoder; invalid sequences decode as U+FFFD.
std::vector<std::uint32_t> decode_utf8(const std::string& s) {
    std::vector<std::uint32_t> cps;
    size_t i = 0;
    while (i < s.size()) {
        unsigned char c = s[i];
        std::uint32_t cp = 0xfffd;
        size_t len = 1;
        if (c < 0x80) {
            cp = c;
        } else if ((c & 0xe0) == 0xc0 && i + 1 < s.size()) {
            cp = (c & 0x1fu) << 6 | (s[i + 1] & 0x3fu);
            len = 2;
        } else if ((c & 0xf0) == 0xe0 && i + 2 < s.size()) {
            cp = (c & 0x0fu) << 12 | (s[i + 1] & 0x3fu) << 6 | (s[i + 2] & 0x3fu);
            len = 3;
        } else if ((c & 0xf8) == 0xf0 && i + 3 < s.size()) {
            cp = (c & 0x07u) << 18 | (s[i + 1] & 0x3fu) << 12 | (s[i + 2] & 0x3fu) << 6 |
                 (s[i + 3] & 0x3fu);
            len = 4;
        }
        cps.push_back(cp);
        i += len;
    }
    return cps;
}

void encode_utf8(std::uint32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

}  // namespace

EncodedPayload encode_actual_text(const std::string& denoised) {
    static const char* hexdig = "0123456789ABCDEF";
    std::vector<std::uint16_t> units;
    units.push_back(0xfeff);
    for (std::uint32_t cp : decode_utf8(denoised)) {
        if (cp >= 0x10000) {
            std::uint32_t v = cp - 0x10000;
            units.push_back(static_cast<std::uint16_t>(0xd800 | (v >> 10)));
            units.push_back(static_cast<std::uint16_t>(0xdc00 | (v & 0x3ff)));
        } else {
            units.push_back(static_cast<std::uint16_t>(cp));
        }
    }
    EncodedPayload out;
    out.plaintext = denoised;
    out.hex.reserve(units.size() * 4);
    for (std::uint16_t u : units) {
        out.hex.push_back(hexdig[(u >> 12) & 0xf]);
        out.hex.push_back(hexdig[(u >> 8) & 0xf]);
        out.hex.push_back(hexdig[(u >> 4) & 0xf]);
        out.hex.push_back(hexdig[u & 0xf]);
    }
    return out;
}

std::string decode_actual_text_bytes(const Bytes& bytes) {
    if (bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0xfe &&
        static_cast<unsigned char>(bytes[1]) == 0xff) {
        if (bytes.size() % 2 != 0)
            throw BadActualTextHex("UTF-16BE payload has odd byte count");
        std::string out;
        size_t i = 2;
        while (i + 2 <= bytes.size()) {
            std::uint32_t u = (static_cast<unsigned char>(bytes[i]) << 8) |
                              static_cast<unsigned char>(bytes[i + 1]);
            i += 2;
            if (u >= 0xd800 && u <= 0xdbff && i + 1 < bytes.size()) {
                std::uint32_t lo = (static_cast<unsigned char>(bytes[i]) << 8) |
                                   static_cast<unsigned char>(bytes[i + 1]);
                if (lo >= 0xdc00 && lo <= 0xdfff) {
                    i += 2;
                    u = 0x10000 + ((u - 0xd800) << 10) + (lo - 0xdc00);
                }
            }
            encode_utf8(u, out);
        }
        return out;
    }
    return bytes;  // PDFDocEncoded / plain bytes
}

namespace {

std::set<std::string> token_set(const std::string& text) {
    std::set<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.insert(cur);
            cur.clear();
        }
    };
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            flush();
        } else if (std::ispunct(c)) {
            // punctuation is stripped entirely
        } else {
            cur.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    flush();
    return out;
}

}  // namespace

double lexical_overlap(const std::string& a, const std::string& b) {
    std::set<std::string> ta = token_set(a);
    std::set<std::string> tb = token_set(b);
    if (ta.empty() || tb.empty())
        throw EmptyTokenSet("text has no tokens after normalization");
    size_t inter = 0;
    for (const std::string& t : ta)
        inter += tb.count(t);
    size_t uni = ta.size() + tb.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("embedding dimensions differ");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0)
        throw ZeroVector("embedding has zero norm");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double semantic_invariance(const std::string& a, const std::string& b, Embedder& embedder) {
    auto vecs = embedder.embed({a, b});
    if (vecs.size() != 2)
        throw EmbedderUnavailable("embedder returned wrong vector count");
    return cosine_similarity(vecs[0], vecs[1]);
}

MutationConfig MutationConfig::defaults() {
    MutationConfig c;
    c.tau = 0.9;
    c.intervals = {{0.2, 0.3}, {0.3, 0.4}, {0.4, 0.5}, {0.5, 0.6}, {0.6, 0.7}, {0.7, 0.8}};
    return c;
}

std::vector<std::string> PayloadPool::members() const {
    std::vector<std::string> out = seeds;
    for (const PayloadVariant& v : variants)
        if (v.accepted)
            out.push_back(v.text);
    return out;
}

PayloadPool build_pool(const PayloadPool& input, const MutationConfig& config,
                       Embedder& embedder) {
    for (const auto& [lo, hi] : config.intervals)
        if (lo < 0.0 || hi > 1.0 || lo > hi)
            throw MalformedSpec("lexical overlap interval outside [0,1]");
    for (size_t i = 0; i < config.intervals.size(); ++i)
        for (size_t j = i + 1; j < config.intervals.size(); ++j)
            if (config.intervals[i].first < config.intervals[j].second &&
                config.intervals[j].first < config.intervals[i].second)
                throw MalformedSpec("lexical overlap intervals overlap");

    PayloadPool out = input;
    out.variants.clear();

    // Pre-embed everything in one call.
    std::vector<std::string> texts = input.seeds;
    for (const PayloadVariant& v : input.variants)
        texts.push_back(v.text);
    auto vectors = embedder.embed(texts);
    if (vectors.size() != texts.size())
        throw EmbedderUnavailable("embedder returned wrong vector count");

    // slot_taken[seed][interval]
    std::vector<std::vector<bool>> slot_taken(
        input.seeds.size(), std::vector<bool>(config.intervals.size(), false));

    for (size_t ci = 0; ci < input.variants.size(); ++ci) {
        PayloadVariant v = input.variants[ci];
        v.interval_index = -1;
        v.accepted = false;
        v.reason.clear();
        if (v.seed_index >= input.seeds.size()) {
            v.reason = "seed_index out of range";
            out.variants.push_back(std::move(v));
            continue;
        }
        v.si = cosine_similarity(vectors[v.seed_index], vectors[input.seeds.size() + ci]);
        v.lo = lexical_overlap(input.seeds[v.seed_index], v.text);
        if (v.si < config.tau) {
            v.reason = "semantic invariance below tau";
            out.variants.push_back(std::move(v));
            continue;
        }
        int hit = -1;
        for (size_t k = 0; k < config.intervals.size(); ++k) {
            if (v.lo >= config.intervals[k].first && v.lo <= config.intervals[k].second) {
                hit = static_cast<int>(k);
                break;
            }
        }
        if (hit < 0) {
            v.reason = "lexical overlap outside every interval";
            out.variants.push_back(std::move(v));
            continue;
        }
        if (slot_taken[v.seed_index][static_cast<size_t>(hit)]) {
            v.interval_index = hit;
            v.reason = "interval slot already filled for this seed";
            out.variants.push_back(std::move(v));
            continue;
        }
        slot_taken[v.seed_index][static_cast<size_t>(hit)] = true;
        v.interval_index = hit;
        v.accepted = true;
        out.variants.push_back(std::move(v));
    }
    return out;
}

std::vector<std::size_t> sample_payload_ids(std::size_t pool_size, std::size_t m, Rng& rng) {
    if (pool_size == 0)
        throw EmptyPool("payload pool is empty");
    std::vector<std::size_t> out;
    out.reserve(m);
    if (m <= pool_size) {
        // partial Fisher-Yates over the id range
        std::vector<std::size_t> ids(pool_size);
        std::iota(ids.begin(), ids.end(), 0);
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t j = i + rng.below(pool_size - i);
            std::swap(ids[i], ids[j]);
            out.push_back(ids[i]);
        }
    } else {
        for (std::size_t i = 0; i < m; ++i)
            out.push_back(rng.below(pool_size));
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON io

PayloadPool parse_pool_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    PayloadPool p;
    p.strategy = j.value("strategy", "explicit");
    if (j.contains("markers"))
        for (const auto& m : j["markers"])
            p.markers.push_back(m.get<std::string>());
    if (j.contains("seeds"))
        for (const auto& s : j["seeds"])
            p.seeds.push_back(s.get<std::string>());
    if (j.contains("variants")) {
        for (const auto& v : j["variants"]) {
            PayloadVariant pv;
            pv.seed_index = v.value("seed_index", static_cast<std::size_t>(0));
            pv.text = v.value("text", "");
            pv.si = v.value("si", 0.0);
            pv.lo = v.value("lo", 0.0);
            pv.interval_index = v.value("interval_index", -1);
            pv.accepted = v.value("accepted", false);
            pv.reason = v.value("reason", "");
            p.variants.push_back(std::move(pv));
        }
    }
    if (p.strategy == "implicit") {
        for (const std::string& seed : p.seeds)
            for (const std::string& marker : p.markers)
                if (seed.find(marker) == std::string::npos)
                    throw MalformedSpec("implicit seed does not mention marker: " + marker);
    }
    for (const std::string& s : p.seeds)
        if (s.empty())
            throw MalformedSpec("empty payload seed");
    return p;
}

PayloadPool load_pool_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw MissingFile("cannot open pool file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_pool_json(ss.str());
}

std::string pool_to_json(const PayloadPool& pool) {
    nlohmann::json j;
    j["strategy"] = pool.strategy;
    j["markers"] = pool.markers;
    j["seeds"] = pool.seeds;
    nlohmann::json vars = nlohmann::json::array();
    for (const PayloadVariant& v : pool.variants) {
        nlohmann::json jv;
        jv["seed_index"] = v.seed_index;
        jv["text"] = v.text;
        jv["si"] = v.si;
        jv["lo"] = v.lo;
        jv["interval_index"] = v.interval_index;
        jv["accepted"] = v.accepted;
        jv["reason"] = v.reason;
        vars.push_back(std::move(jv));
    }
    j["variants"] = std::move(vars);
    return j.dump(2);
}

}  // namespace pdfshield
