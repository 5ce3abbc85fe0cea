#pragma once

#include <stdexcept>
#include <string>

namespace astsum {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lexing/parsing failures carry a source position.
struct LexError : Error {
    LexError(const std::string& msg, int line, int col)
        : Error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(col)),
          line(line), col(col) {}
    int line, col;
};

struct ParseError : Error {
    ParseError(const std::string& msg, int line, int col)
        : Error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(col)),
          line(line), col(col) {}
    int line, col;
};

// A document that does not match the expected JSON shape.
struct SchemaError : Error { using Error::Error; };
// A structurally broken tree: cycle, multiple roots, orphan node.
struct StructureError : Error { using Error::Error; };

struct KindMismatchError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct EmptyRowError : Error { using Error::Error; };
struct AllPadError : Error { using Error::Error; };
struct NonFiniteError : Error { using Error::Error; };
struct NonFiniteGradientError : Error { using Error::Error; };
struct VocabError : Error { using Error::Error; };
struct LengthError : Error { using Error::Error; };
struct EmptyCorpusError : Error { using Error::Error; };
struct EmptyInputError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct VersionError : Error { using Error::Error; };
struct ShapeMismatchError : Error { using Error::Error; };

}  // namespace astsum
