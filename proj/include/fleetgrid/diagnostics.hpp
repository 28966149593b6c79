#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fleetgrid {

enum class Severity { warning, error };

struct Finding {
    Severity severity = Severity::error;
    std::string location;  // JSON-pointer-ish path or element id
    std::string message;
};

// Collects validation findings instead of failing fast, so callers can
// report every problem in one pass.
class Diagnostics {
  public:
    void error(std::string location, std::string message) {
        findings_.push_back({Severity::error, std::move(location), std::move(message)});
    }
    void warning(std::string location, std::string message) {
        findings_.push_back({Severity::warning, std::move(location), std::move(message)});
    }
    void merge(const Diagnostics& other) {
        findings_.insert(findings_.end(), other.findings_.begin(), other.findings_.end());
    }

    const std::vector<Finding>& findings() const { return findings_; }
    bool has_errors() const {
        for (const auto& f : findings_)
            if (f.severity == Severity::error) return true;
        return false;
    }
    std::size_t error_count() const {
        std::size_t n = 0;
        for (const auto& f : findings_)
            if (f.severity == Severity::error) ++n;
        return n;
    }
    std::string to_string() const {
        std::string out;
        for (const auto& f : findings_) {
            out += (f.severity == Severity::error ? "error: " : "warning: ");
            out += f.location;
            out += ": ";
            out += f.message;
            out += '\n';
        }
        return out;
    }

  private:
    std::vector<Finding> findings_;
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fleetgrid
