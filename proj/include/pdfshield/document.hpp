#pragma once

#include <map>
#include <string>
#include <vector>

#include "pdfshield/object.hpp"

namespace pdfshield {

/// In-memory PDF document: numbered indirect objects plus the trailer.
///
/// The loader understands classic xref tables, xref streams and object
/// streams, with a whole-file scan as fallback for damaged tables. The writer
/// re-emits a classic-xref file retaining only objects reachable from the
/// Document Catalog (and /Info), renumbered densely — orphans are dropped.
class Document {
public:
    static Document load(const std::string& path);
    static Document from_bytes(const Bytes& data);

    Bytes save_bytes() const;
    void save(const std::string& path) const;

    /// Resolve references (possibly chained); non-references pass through.
    const Object& resolve(const Object& o) const;
    const Object* get(int number) const;
    Object* get(int number);

    Reference add_object(Object obj);
    void set_object(int number, Object obj);

    const Dict& trailer() const { return trailer_; }
    Dict& trailer() { return trailer_; }

    /// Page object numbers in document order.
    std::vector<int> pages() const;

    /// Look up a page attribute honoring page-tree inheritance
    /// (/Resources, /MediaBox, ...). Returns nullptr if absent everywhere.
    const Object* page_attr(int page_number, const std::string& key) const;

    /// Decode one stream object's data (no filter, or FlateDecode with an
    /// optional PNG predictor). Anything else raises UnsupportedFilter.
    static Bytes decode_stream(const Stream& s, const Document& doc);
    Bytes decode_stream(const Stream& s) const { return decode_stream(s, *this); }

    /// Build a FlateDecode stream object from plain content.
    static Object make_flate_stream(const Bytes& content);

    const std::map<int, Object>& objects() const { return objects_; }

private:
    void load_from(const Bytes& data);
    void parse_xref_chain(const Bytes& data, size_t start_offset);
    bool parse_xref_at(const Bytes& data, size_t offset, std::map<int, size_t>& table,
                       std::vector<std::pair<int, int>>& compressed, Dict& trailer_out,
                       std::vector<size_t>& prev_offsets);
    void scan_all_objects(const Bytes& data, std::map<int, size_t>& table);
    void materialize(const Bytes& data, const std::map<int, size_t>& table,
                     const std::vector<std::pair<int, int>>& compressed);
    Object parse_indirect_at(const Bytes& data, size_t offset,
                             const std::map<int, size_t>& table, int* number_out);

    std::map<int, Object> objects_;
    Dict trailer_;
    int next_number_ = 1;
};

}  // namespace pdfshield
