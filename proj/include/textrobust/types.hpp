#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace textrobust {

using Scalar = double;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
// Data tables (one row per token / example) are row-major so a row is contiguous.
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Input files that fail to parse. `line` is 1-based, 0 when not line-specific.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::string file = {}, long line = 0)
        : std::runtime_error(format(what, file, line)), file_(std::move(file)), line_(line) {}

    const std::string& file() const { return file_; }
    long line() const { return line_; }

private:
    static std::string format(const std::string& what, const std::string& file, long line) {
        std::string msg;
        if (!file.empty()) {
            msg += file;
            if (line > 0) msg += ":" + std::to_string(line);
            msg += ": ";
        }
        return msg + what;
    }

    std::string file_;
    long line_;
};

// Invalid configuration or arguments, detected before any heavy work. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Runtime failure mid-computation (e.g. divergent training). CLI exit code 1.
class TrainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace textrobust
