#include "pdfshield/document.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>

#include "pdfshield/errors.hpp"
#include "pdfshield/parser.hpp"

namespace pdfshield {

namespace {

Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw MissingFile("cannot open " + path);
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

Document Document::load(const std::string& path) { return from_bytes(read_file(path)); }

Document Document::from_bytes(const Bytes& data) {
    Document doc;
    doc.load_from(data);
    return doc;
}

const Object& Document::resolve(const Object& o) const {
    const Object* cur = &o;
    int guard = 0;
    while (cur->is_reference()) {
        if (++guard > 64)
            throw ParseError("reference cycle");
        const Object* next = get(cur->as_reference().number);
        if (!next) {
            static const Object null_obj;
            return null_obj;
        }
        cur = next;
    }
    return *cur;
}

const Object* Document::get(int number) const {
    auto it = objects_.find(number);
    return it == objects_.end() ? nullptr : &it->second;
}

Object* Document::get(int number) {
    auto it = objects_.find(number);
    return it == objects_.end() ? nullptr : &it->second;
}

Reference Document::add_object(Object obj) {
    int num = next_number_++;
    objects_.emplace(num, std::move(obj));
    return Reference{num, 0};
}

void Document::set_object(int number, Object obj) {
    objects_[number] = std::move(obj);
    next_number_ = std::max(next_number_, number + 1);
}

// ---------------------------------------------------------------------------
// Loading

void Document::load_from(const Bytes& data) {
    if (data.compare(0, 5, "%PDF-") != 0)
        throw ParseError("missing %PDF header");

    std::map<int, size_t> table;                     // objnum -> byte offset
    std::vector<std::pair<int, int>> compressed;     // objnum -> container objnum
    bool xref_ok = false;

    // Locate startxref near the tail.
    size_t tail_at = data.size() > 2048 ? data.size() - 2048 : 0;
    size_t sx = data.rfind("startxref");
    if (sx != Bytes::npos && sx >= tail_at) {
        ObjectScanner sc(data, sx + 9);
        sc.skip_ws();
        if (auto off = sc.parse_uint()) {
            try {
                std::vector<size_t> offsets{static_cast<size_t>(*off)};
                std::set<size_t> seen;
                while (!offsets.empty()) {
                    size_t o = offsets.back();
                    offsets.pop_back();
                    if (!seen.insert(o).second)
                        continue;
                    Dict tr;
                    std::vector<size_t> prevs;
                    if (!parse_xref_at(data, o, table, compressed, tr, prevs))
                        throw ParseError("bad xref section");
                    // Earlier sections must not override newer entries; the
                    // chain is walked newest-first and inserts skip existing.
                    if (trailer_.empty())
                        trailer_ = tr;
                    for (const auto& [k, v] : tr.items())
                        if (!trailer_.has(k))
                            trailer_.set(k, v);
                    for (size_t p : prevs)
                        offsets.push_back(p);
                }
                xref_ok = trailer_.has("Root");
            } catch (const Error&) {
                xref_ok = false;
            }
        }
    }

    if (!xref_ok) {
        table.clear();
        compressed.clear();
        trailer_ = Dict{};
        scan_all_objects(data, table);
    }

    materialize(data, table, compressed);

    if (!trailer_.has("Root")) {
        // Reconstruct the trailer by locating the catalog.
        for (const auto& [num, obj] : objects_) {
            if (obj.is_dict() && !obj.is_stream()) {
                const Object* t = obj.as_dict().find("Type");
                if (t && t->is_name() && t->as_name().value == "Catalog") {
                    trailer_.set("Root", Object(Reference{num, 0}));
                    break;
                }
            }
        }
    }
    if (!trailer_.has("Root"))
        throw ParseError("no document catalog found");

    next_number_ = objects_.empty() ? 1 : objects_.rbegin()->first + 1;
}

bool Document::parse_xref_at(const Bytes& data, size_t offset,
                             std::map<int, size_t>& table,
                             std::vector<std::pair<int, int>>& compressed,
                             Dict& trailer_out, std::vector<size_t>& prev_offsets) {
    if (offset >= data.size())
        return false;
    ObjectScanner sc(data, offset);
    sc.skip_ws();
    if (sc.accept_keyword("xref")) {
        // Classic table: subsections of "first count" then 20-byte entries.
        while (true) {
            sc.skip_ws();
            if (sc.accept_keyword("trailer"))
                break;
            auto first = sc.parse_uint();
            auto count = sc.parse_uint();
            if (!first || !count)
                return false;
            sc.skip_ws();
            size_t p = sc.pos();
            for (std::int64_t i = 0; i < *count; ++i) {
                if (p + 18 > data.size())
                    return false;
                Bytes entry = data.substr(p, 18);
                char kind = entry[17];
                if (kind == 'n') {
                    size_t off = std::strtoull(entry.substr(0, 10).c_str(), nullptr, 10);
                    table.emplace(static_cast<int>(*first + i), off);
                }
                p += 20;
                if (p > data.size())
                    p = data.size();
            }
            sc.seek(p);
        }
        sc.skip_ws();
        Object tr = sc.parse_object();
        if (!tr.is_dict())
            return false;
        trailer_out = tr.as_dict();
        if (const Object* prev = trailer_out.find("Prev"))
            prev_offsets.push_back(static_cast<size_t>(prev->as_int()));
        if (const Object* xs = trailer_out.find("XRefStm"))
            prev_offsets.push_back(static_cast<size_t>(xs->as_int()));
        return true;
    }

    // Otherwise expect an xref stream: "N G obj <<...>> stream ... endstream".
    sc.seek(offset);
    int num = 0;
    Object obj = parse_indirect_at(data, offset, {}, &num);
    if (!obj.is_stream())
        return false;
    const Stream& st = obj.as_stream();
    const Dict& d = st.dict;
    const Object* type = d.find("Type");
    if (!type || !type->is_name() || type->as_name().value != "XRef")
        return false;

    Bytes decoded = decode_stream(st, *this);
    const Object* wobj = d.find("W");
    if (!wobj || !wobj->is_array())
        return false;
    std::vector<int> w;
    for (const Object& e : wobj->as_array())
        w.push_back(static_cast<int>(e.as_int()));
    if (w.size() < 3)
        return false;
    int entry_len = w[0] + w[1] + w[2];
    if (entry_len <= 0)
        return false;

    std::vector<std::pair<std::int64_t, std::int64_t>> index;
    if (const Object* io = d.find("Index")) {
        const Array& ia = io->as_array();
        for (size_t i = 0; i + 1 < ia.size(); i += 2)
            index.emplace_back(ia[i].as_int(), ia[i + 1].as_int());
    } else {
        index.emplace_back(0, d.at("Size").as_int());
    }

    auto read_field = [&](size_t pos, int width, std::int64_t dflt) -> std::int64_t {
        if (width == 0)
            return dflt;
        std::int64_t v = 0;
        for (int i = 0; i < width; ++i)
            v = (v << 8) | static_cast<unsigned char>(decoded[pos + i]);
        return v;
    };

    size_t pos = 0;
    for (auto [first, count] : index) {
        for (std::int64_t i = 0; i < count; ++i) {
            if (pos + entry_len > decoded.size())
                break;
            std::int64_t t = read_field(pos, w[0], 1);
            std::int64_t f2 = read_field(pos + w[0], w[1], 0);
            std::int64_t f3 = read_field(pos + w[0] + w[1], w[2], 0);
            (void)f3;
            int objnum = static_cast<int>(first + i);
            if (t == 1) {
                table.emplace(objnum, static_cast<size_t>(f2));
            } else if (t == 2) {
                compressed.emplace_back(objnum, static_cast<int>(f2));
            }
            pos += entry_len;
        }
    }

    trailer_out = d;
    trailer_out.erase("Type");
    trailer_out.erase("W");
    trailer_out.erase("Index");
    trailer_out.erase("Filter");
    trailer_out.erase("DecodeParms");
    trailer_out.erase("Length");
    if (const Object* prev = trailer_out.find("Prev")) {
        prev_offsets.push_back(static_cast<size_t>(prev->as_int()));
        trailer_out.erase("Prev");
    }
    return true;
}

void Document::scan_all_objects(const Bytes& data, std::map<int, size_t>& table) {
    // Brute-force recovery: find every "N G obj" at a line-ish boundary.
    size_t pos = 0;
    while (pos < data.size()) {
        size_t hit = data.find(" obj", pos);
        size_t hit2 = data.find("\nobj", pos);  // unusual but cheap to accept
        if (hit2 < hit)
            hit = hit2;
        if (hit == Bytes::npos)
            break;
        // Walk backwards over "N G ".
        size_t p = hit;
        auto skip_back_digits = [&](size_t q) -> size_t {
            while (q > 0 && std::isdigit(static_cast<unsigned char>(data[q - 1])))
                --q;
            return q;
        };
        size_t gen_end = p;
        size_t gen_start = skip_back_digits(gen_end);
        if (gen_start == gen_end || gen_start == 0 ||
            !is_pdf_whitespace(data[gen_start - 1])) {
            pos = hit + 4;
            continue;
        }
        size_t num_end = gen_start - 1;
        while (num_end > 0 && is_pdf_whitespace(data[num_end]))
            --num_end;
        ++num_end;
        size_t num_start = skip_back_digits(num_end);
        if (num_start == num_end) {
            pos = hit + 4;
            continue;
        }
        int num = std::atoi(data.substr(num_start, num_end - num_start).c_str());
        table[num] = num_start;  // later definitions win
        pos = hit + 4;
    }
}

Object Document::parse_indirect_at(const Bytes& data, size_t offset,
                                   const std::map<int, size_t>& table, int* number_out) {
    ObjectScanner sc(data, offset);
    sc.skip_ws();
    auto num = sc.parse_uint();
    auto gen = sc.parse_uint();
    if (!num || !gen)
        throw ParseError("malformed indirect object header");
    sc.skip_ws();
    if (!sc.accept_keyword("obj"))
        throw ParseError("expected obj keyword");
    if (number_out)
        *number_out = static_cast<int>(*num);
    Object obj = sc.parse_object();
    sc.skip_ws();
    if (sc.peek_keyword("stream")) {
        sc.accept_keyword("stream");
        size_t p = sc.pos();
        if (p < data.size() && data[p] == '\r')
            ++p;
        if (p < data.size() && data[p] == '\n')
            ++p;
        const Dict& d = obj.as_dict();
        std::int64_t length = -1;
        if (const Object* lo = d.find("Length")) {
            if (lo->is_int()) {
                length = lo->as_int();
            } else if (lo->is_reference()) {
                auto it = table.find(lo->as_reference().number);
                if (it != table.end()) {
                    int dummy = 0;
                    Object lv = parse_indirect_at(data, it->second, {}, &dummy);
                    if (lv.is_int())
                        length = lv.as_int();
                } else if (const Object* existing = get(lo->as_reference().number)) {
                    if (existing->is_int())
                        length = existing->as_int();
                }
            }
        }
        size_t end = Bytes::npos;
        if (length >= 0 && p + static_cast<size_t>(length) <= data.size()) {
            // Trust /Length only if endstream actually follows.
            size_t q = p + static_cast<size_t>(length);
            size_t r = q;
            while (r < data.size() && is_pdf_whitespace(data[r]))
                ++r;
            if (data.compare(r, 9, "endstream") == 0)
                end = q;
        }
        if (end == Bytes::npos) {
            end = data.find("endstream", p);
            if (end == Bytes::npos)
                throw ParseError("unterminated stream object");
            // trim one trailing EOL
            if (end > p && data[end - 1] == '\n')
                --end;
            if (end > p && data[end - 1] == '\r')
                --end;
        }
        Stream st;
        st.dict = obj.as_dict();
        st.raw = data.substr(p, end - p);
        st.dict.set("Length", Object(static_cast<std::int64_t>(st.raw.size())));
        return Object(std::move(st));
    }
    return obj;
}

void Document::materialize(const Bytes& data, const std::map<int, size_t>& table,
                           const std::vector<std::pair<int, int>>& compressed) {
    for (const auto& [num, offset] : table) {
        if (offset >= data.size())
            continue;
        try {
            int actual = 0;
            Object obj = parse_indirect_at(data, offset, table, &actual);
            // xref offsets occasionally point at a renumbered object; trust
            // the header over the table.
            objects_.emplace(actual, std::move(obj));
        } catch (const Error&) {
            // skip unparseable entries; reachability decides what matters
        }
    }

    // Expand object streams.
    std::set<int> containers;
    for (const auto& [num, container] : compressed)
        containers.insert(container);
    // Fallback scans may also have found ObjStm containers.
    for (const auto& [num, obj] : objects_) {
        if (obj.is_stream()) {
            const Object* t = obj.as_stream().dict.find("Type");
            if (t && t->is_name() && t->as_name().value == "ObjStm")
                containers.insert(num);
        }
    }
    for (int cnum : containers) {
        const Object* cobj = get(cnum);
        if (!cobj || !cobj->is_stream())
            continue;
        try {
            const Stream& st = cobj->as_stream();
            Bytes decoded = decode_stream(st, *this);
            std::int64_t n = st.dict.at("N").as_int();
            std::int64_t first = st.dict.at("First").as_int();
            ObjectScanner hdr(decoded, 0);
            std::vector<std::pair<int, size_t>> entries;
            for (std::int64_t i = 0; i < n; ++i) {
                auto onum = hdr.parse_uint();
                auto ooff = hdr.parse_uint();
                if (!onum || !ooff)
                    break;
                entries.emplace_back(static_cast<int>(*onum),
                                     static_cast<size_t>(first + *ooff));
            }
            for (auto [onum, ooff] : entries) {
                if (objects_.count(onum))
                    continue;  // table entries win
                ObjectScanner sc(decoded, ooff);
                objects_.emplace(onum, sc.parse_object());
            }
        } catch (const Error&) {
        }
    }
}

// ---------------------------------------------------------------------------
// Stream decode / encode

Bytes Document::decode_stream(const Stream& s, const Document& doc) {
    const Object* filter = s.dict.find("Filter");
    if (!filter)
        return s.raw;
    const Object& f = doc.resolve(*filter);
    std::vector<std::string> names;
    if (f.is_name()) {
        names.push_back(f.as_name().value);
    } else if (f.is_array()) {
        for (const Object& e : f.as_array())
            names.push_back(doc.resolve(e).as_name().value);
    } else {
        throw UnsupportedFilter("unexpected /Filter object type");
    }
    if (names.empty())
        return s.raw;
    if (names.size() > 1 || names[0] != "FlateDecode")
        throw UnsupportedFilter("unsupported stream filter /" + names[0]);

    Bytes out = flate_decode(s.raw);

    if (const Object* parms = s.dict.find("DecodeParms")) {
        const Object& p = doc.resolve(*parms);
        if (p.is_dict()) {
            const Dict& pd = p.as_dict();
            int predictor = 1;
            int columns = 1;
            int colors = 1;
            int bpc = 8;
            if (const Object* o = pd.find("Predictor"))
                predictor = static_cast<int>(doc.resolve(*o).as_int());
            if (const Object* o = pd.find("Columns"))
                columns = static_cast<int>(doc.resolve(*o).as_int());
            if (const Object* o = pd.find("Colors"))
                colors = static_cast<int>(doc.resolve(*o).as_int());
            if (const Object* o = pd.find("BitsPerComponent"))
                bpc = static_cast<int>(doc.resolve(*o).as_int());
            if (predictor >= 10)
                out = undo_png_predictor(out, columns * colors * bpc / 8);
            else if (predictor != 1)
                throw UnsupportedFilter("unsupported predictor");
        }
    }
    return out;
}

Object Document::make_flate_stream(const Bytes& content) {
    Stream st;
    st.raw = flate_encode(content);
    st.dict.set("Filter", Object::name("FlateDecode"));
    st.dict.set("Length", Object(static_cast<std::int64_t>(st.raw.size())));
    return Object(std::move(st));
}

// ---------------------------------------------------------------------------
// Page tree

std::vector<int> Document::pages() const {
    std::vector<int> out;
    const Object* rootref = trailer_.find("Root");
    if (!rootref)
        return out;
    const Object& root = resolve(*rootref);
    if (!root.is_dict() && !root.is_stream())
        return out;
    const Object* pagesref = root.as_dict().find("Pages");
    if (!pagesref)
        return out;

    std::set<int> visited;
    std::function<void(const Object&)> walk = [&](const Object& noderef) {
        if (noderef.is_reference()) {
            int n = noderef.as_reference().number;
            if (!visited.insert(n).second)
                return;
            const Object* node = get(n);
            if (!node)
                return;
            const Dict& d = node->as_dict();
            const Object* type = d.find("Type");
            std::string t = type && type->is_name() ? type->as_name().value : "";
            if (t == "Page") {
                out.push_back(n);
            } else {
                if (const Object* kids = d.find("Kids")) {
                    const Object& ka = resolve(*kids);
                    if (ka.is_array())
                        for (const Object& kid : ka.as_array())
                            walk(kid);
                }
            }
        }
    };
    walk(*pagesref);
    return out;
}

const Object* Document::page_attr(int page_number, const std::string& key) const {
    int cur = page_number;
    std::set<int> seen;
    while (cur > 0 && seen.insert(cur).second) {
        const Object* node = get(cur);
        if (!node)
            return nullptr;
        const Dict& d = node->as_dict();
        if (const Object* v = d.find(key))
            return v;
        const Object* parent = d.find("Parent");
        if (!parent || !parent->is_reference())
            return nullptr;
        cur = parent->as_reference().number;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Saving

Bytes Document::save_bytes() const {
    // Collect reachable objects (DFS from /Root then /Info), assigning new
    // numbers in first-visit order for deterministic output.
    std::map<int, int> renumber;
    std::vector<int> order;
    std::function<void(const Object&)> visit = [&](const Object& o) {
        if (o.is_reference()) {
            int n = o.as_reference().number;
            if (renumber.count(n))
                return;
            const Object* target = get(n);
            if (!target)
                return;  // dangling reference: drop silently
            renumber[n] = static_cast<int>(renumber.size()) + 1;
            order.push_back(n);
            visit(*target);
            return;
        }
        if (o.is_array()) {
            for (const Object& e : o.as_array())
                visit(e);
        } else if (o.is_dict() || o.is_stream()) {
            for (const auto& [k, v] : o.as_dict().items())
                visit(v);
        }
    };
    if (const Object* root = trailer_.find("Root"))
        visit(*root);
    if (const Object* info = trailer_.find("Info"))
        visit(*info);

    std::function<Object(const Object&)> remap = [&](const Object& o) -> Object {
        if (o.is_reference()) {
            auto it = renumber.find(o.as_reference().number);
            if (it == renumber.end())
                return Object::null();
            return Object(Reference{it->second, 0});
        }
        if (o.is_array()) {
            Array out;
            out.reserve(o.as_array().size());
            for (const Object& e : o.as_array())
                out.push_back(remap(e));
            return Object(std::move(out));
        }
        if (o.is_stream()) {
            Stream st;
            st.raw = o.as_stream().raw;
            for (const auto& [k, v] : o.as_stream().dict.items())
                st.dict.set(k, remap(v));
            return Object(std::move(st));
        }
        if (o.is_dict()) {
            Dict d;
            for (const auto& [k, v] : o.as_dict().items())
                d.set(k, remap(v));
            return Object(std::move(d));
        }
        return o;
    };

    Bytes out = "%PDF-1.7\n%\xc7\xec\x8f\xa2\n";
    std::vector<size_t> offsets(order.size() + 1, 0);
    for (size_t i = 0; i < order.size(); ++i) {
        offsets[i + 1] = out.size();
        Object mapped = remap(*get(order[i]));
        out += std::to_string(i + 1) + " 0 obj\n";
        out += serialize_object(mapped);
        out += "\nendobj\n";
    }

    size_t xref_at = out.size();
    out += "xref\n0 " + std::to_string(order.size() + 1) + "\n";
    out += "0000000000 65535 f \n";
    for (size_t i = 1; i <= order.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%010zu 00000 n \n", offsets[i]);
        out += buf;
    }

    Dict tr;
    tr.set("Size", Object(static_cast<std::int64_t>(order.size() + 1)));
    if (const Object* root = trailer_.find("Root"))
        tr.set("Root", remap(*root));
    if (const Object* info = trailer_.find("Info")) {
        Object mapped = remap(*info);
        if (!mapped.is_null())
            tr.set("Info", mapped);
    }
    out += "trailer\n" + serialize_object(Object(tr)) + "\n";
    out += "startxref\n" + std::to_string(xref_at) + "\n%%EOF\n";
    return out;
}

void Document::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw MissingFile("cannot write " + path);
    Bytes data = save_bytes();
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
}

}  // namespace pdfshield
