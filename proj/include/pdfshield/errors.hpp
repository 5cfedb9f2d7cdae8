#pragma once

#include <stdexcept>
#include <string>

namespace pdfshield {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Content-stream lexing / structure.
struct UnbalancedString : Error { using Error::Error; };
struct TruncatedStream : Error { using Error::Error; };
struct UnbalancedOperators : Error { using Error::Error; };
struct UnsupportedFilter : Error { using Error::Error; };

// Text state machine.
struct MalformedOperands : Error { using Error::Error; };
struct MissingFont : Error { using Error::Error; };
struct EmptyPage : Error { using Error::Error; };

// Payload pool.
struct EmptyAfterDenoise : Error { using Error::Error; };
struct EmptyTokenSet : Error { using Error::Error; };
struct EmbedderUnavailable : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct ZeroVector : Error { using Error::Error; };
struct EmptyPool : Error { using Error::Error; };

// Injection.
struct NoInsertionPoints : Error { using Error::Error; };
struct MissingLayoutElement : Error { using Error::Error; };
struct NoAnchors : Error { using Error::Error; };
struct ZeroWidthFont : Error { using Error::Error; };

// Fingerprint / sanitization / extraction.
struct MalformedContents : Error { using Error::Error; };
struct MalformedSpec : Error { using Error::Error; };
struct BadActualTextHex : Error { using Error::Error; };
struct EmptyCorpus : Error { using Error::Error; };

// Metrics.
struct UnsupportedDepth : Error { using Error::Error; };
struct MissingFile : Error { using Error::Error; };

// Low-level PDF object layer.
struct ParseError : Error { using Error::Error; };

}  // namespace pdfshield
