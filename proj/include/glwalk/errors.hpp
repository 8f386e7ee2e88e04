#pragma once

#include <stdexcept>
#include <string>

namespace glwalk {

// Process exit codes used by the CLI. Library code throws; the CLI maps the
// exception to the code and prints a one-line machine-parsable tag on stderr.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int budget = 3;
inline constexpr int degenerate_variance = 4;
inline constexpr int noise_dominated = 5;
} // namespace exit_code

class Error : public std::runtime_error {
public:
    Error(std::string tag, const std::string& what, int code)
        : std::runtime_error(what), tag_(std::move(tag)), code_(code) {}
    const std::string& tag() const noexcept { return tag_; }
    int code() const noexcept { return code_; }

private:
    std::string tag_;
    int code_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config-error", what, exit_code::config) {}
};

struct BudgetError : Error {
    explicit BudgetError(const std::string& what) : Error("budget-error", what, exit_code::budget) {}
};

struct SingularEnsembleError : Error {
    explicit SingularEnsembleError(const std::string& what)
        : Error("singular-ensemble", what, exit_code::config) {}
};

struct DegenerateVarianceError : Error {
    explicit DegenerateVarianceError(const std::string& what)
        : Error("degenerate-variance", what, exit_code::degenerate_variance) {}
};

struct NoiseDominatedError : Error {
    explicit NoiseDominatedError(const std::string& what)
        : Error("noise-dominated", what, exit_code::noise_dominated) {}
};

struct InsufficientGridError : Error {
    explicit InsufficientGridError(const std::string& what)
        : Error("insufficient-grid", what, exit_code::config) {}
};

struct SchemaMismatchError : Error {
    explicit SchemaMismatchError(const std::string& what)
        : Error("schema-mismatch", what, exit_code::config) {}
};

} // namespace glwalk
