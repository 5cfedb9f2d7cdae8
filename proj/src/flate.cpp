#include "pdfshield/flate.hpp"

#include <zlib.h>

#include <cstring>

#include "pdfshield/errors.hpp"

namespace pdfshield {

Bytes flate_decode(const Bytes& in) {
    z_stream zs;
    std::memset(&zs, 0, sizeof(zs));
    if (inflateInit(&zs) != Z_OK)
        throw UnsupportedFilter("zlib inflateInit failed");

    Bytes out;
    out.reserve(in.size() * 4);
    unsigned char buf[1 << 15];
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    int rc = Z_OK;
    do {
        zs.next_out = buf;
        zs.avail_out = sizeof(buf);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END && rc != Z_BUF_ERROR) {
            inflateEnd(&zs);
            throw UnsupportedFilter("FlateDecode: corrupt deflate data");
        }
        out.append(reinterpret_cast<char*>(buf), sizeof(buf) - zs.avail_out);
        if (rc == Z_BUF_ERROR && zs.avail_in == 0)
            break;  // tolerate missing terminator, common in the wild
    } while (rc != Z_STREAM_END);
    inflateEnd(&zs);
    return out;
}

Bytes flate_encode(const Bytes& in) {
    uLongf bound = compressBound(static_cast<uLong>(in.size()));
    Bytes out(bound, '\0');
    if (compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                  reinterpret_cast<const Bytef*>(in.data()),
                  static_cast<uLong>(in.size()), Z_DEFAULT_COMPRESSION) != Z_OK)
        throw UnsupportedFilter("zlib compress2 failed");
    out.resize(bound);
    return out;
}

Bytes undo_png_predictor(const Bytes& in, int columns) {
    if (columns <= 0)
        throw UnsupportedFilter("predictor: bad column count");
    const size_t row = static_cast<size_t>(columns);
    Bytes out;
    out.reserve(in.size());
    Bytes prev(row, '\0');
    size_t pos = 0;
    while (pos + 1 + row <= in.size() + row) {
        if (pos >= in.size())
            break;
        unsigned char tag = static_cast<unsigned char>(in[pos++]);
        size_t avail = std::min(row, in.size() - pos);
        Bytes cur(in.substr(pos, avail));
        cur.resize(row, '\0');
        pos += avail;
        switch (tag) {
            case 0:
                break;
            case 1:
                for (size_t i = 1; i < row; ++i)
                    cur[i] = static_cast<char>(static_cast<unsigned char>(cur[i]) +
                                               static_cast<unsigned char>(cur[i - 1]));
                break;
            case 2:
                for (size_t i = 0; i < row; ++i)
                    cur[i] = static_cast<char>(static_cast<unsigned char>(cur[i]) +
                                               static_cast<unsigned char>(prev[i]));
                break;
            case 3:
                for (size_t i = 0; i < row; ++i) {
                    unsigned left = i ? static_cast<unsigned char>(cur[i - 1]) : 0u;
                    unsigned up = static_cast<unsigned char>(prev[i]);
                    cur[i] = static_cast<char>(static_cast<unsigned char>(cur[i]) +
                                               ((left + up) >> 1));
                }
                break;
            case 4:
                for (size_t i = 0; i < row; ++i) {
                    int a = i ? static_cast<unsigned char>(cur[i - 1]) : 0;
                    int b = static_cast<unsigned char>(prev[i]);
                    int c = i ? static_cast<unsigned char>(prev[i - 1]) : 0;
                    int p = a + b - c;
                    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
                    int pred = (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
                    cur[i] = static_cast<char>(static_cast<unsigned char>(cur[i]) + pred);
                }
                break;
            default:
                throw UnsupportedFilter("predictor: unknown PNG filter tag");
        }
        out += cur;
        prev = cur;
    }
    return out;
}

}  // namespace pdfshield
