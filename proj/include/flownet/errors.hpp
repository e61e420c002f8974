#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flownet {

// Shape problems: dimension mismatches, unknown ids, overlapping controllers.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Semantic validation failure; carries every violation found, not just the first.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    [[nodiscard]] const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out = "validation failed";
        for (const auto& s : issues) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

// An iterative scheme hit its cap. The last residual is kept for diagnostics.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_residual, int iterations)
        : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations) {}

    [[nodiscard]] double last_residual() const noexcept { return last_residual_; }
    [[nodiscard]] int iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

// The weighted-norm construction could not certify a contraction factor below one.
class CertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace flownet
