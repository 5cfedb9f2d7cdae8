#pragma once

#include <string>

namespace pdfshield {

using Bytes = std::string;

/// Inflate a zlib/deflate stream. Throws UnsupportedFilter on corrupt input.
Bytes flate_decode(const Bytes& in);

/// Deflate with zlib default settings.
Bytes flate_encode(const Bytes& in);

/// Undo a PNG row predictor (Predictor >= 10) as used by xref streams.
/// `columns` is the number of bytes per row before prediction.
Bytes undo_png_predictor(const Bytes& in, int columns);

}  // namespace pdfshield
