#pragma once

#include "foldcont/linalg/vector.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace foldcont {

/// Sign pattern of a point in R^n, one entry +1 or -1 per coordinate.
class OrthantSignature {
public:
    OrthantSignature() = default;
    explicit OrthantSignature(std::vector<signed char> signs);

    /// Bit i set means coordinate i is positive.
    static OrthantSignature from_bits(std::size_t n, unsigned long long bits);
    /// Parses "+-+..." strings.
    static OrthantSignature parse(const std::string& text);
    /// Signs of u; entries that are exactly zero count as positive.
    static OrthantSignature of(const Vector& u);

    [[nodiscard]] std::size_t size() const noexcept { return signs_.size(); }
    [[nodiscard]] int operator[](std::size_t i) const { return signs_[i]; }
    [[nodiscard]] const std::vector<signed char>& signs() const noexcept { return signs_; }
    [[nodiscard]] OrthantSignature flipped(std::size_t i) const;
    [[nodiscard]] std::string str() const;

    /// True when sign(u_i) = signs_i for every |u_i| > tol.
    [[nodiscard]] bool admits(const Vector& u, double tol = 1e-10) const;

    auto operator<=>(const OrthantSignature&) const = default;

private:
    std::vector<signed char> signs_;
};

enum class Provenance { oracle, diagram, sampling, multistart, continuation };

[[nodiscard]] const char* to_string(Provenance p) noexcept;

struct SolutionRecord {
    Vector u;
    double residual = 0.0;
    std::size_t morse_index = 0;
    std::optional<OrthantSignature> signature;
    Provenance provenance = Provenance::oracle;
};

/// Deduplicated set of solutions. Two records are the same solution when
/// they agree to dedup_tol in the max norm; records whose residual is not
/// below max_residual are refused.
class SolutionBank {
public:
    explicit SolutionBank(double dedup_tol = 1e-6, double max_residual = 1e-8);

    /// Returns false when the record duplicates an existing one or fails the
    /// residual bound.
    bool insert(SolutionRecord record);
    /// Inserts every record of `other`; returns how many were new.
    std::size_t merge(const SolutionBank& other);

    [[nodiscard]] const std::vector<SolutionRecord>& records() const noexcept { return records_; }
    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
    [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
    [[nodiscard]] double dedup_tol() const noexcept { return dedup_tol_; }
    [[nodiscard]] double max_residual() const noexcept { return max_residual_; }

    [[nodiscard]] std::optional<std::size_t> find(const Vector& u, double tol) const;
    [[nodiscard]] bool contains(const Vector& u, double tol) const { return find(u, tol).has_value(); }

    /// histogram[k] = number of records with Morse index k.
    [[nodiscard]] std::vector<std::size_t> morse_histogram() const;

    /// Orders records by Morse index, then lexicographically; makes output
    /// independent of discovery order.
    void sort_canonical();

private:
    double dedup_tol_;
    double max_residual_;
    std::vector<SolutionRecord> records_;
};

/// CSV with header index,morse,residual,signature,u_1..u_n; numbers carry 17
/// significant digits so a read-write cycle is exact.
void write_bank_csv(const SolutionBank& bank, std::ostream& out);
[[nodiscard]] SolutionBank read_bank_csv(std::istream& in, double dedup_tol = 1e-6);

/// %.17g formatting used by every CSV writer.
[[nodiscard]] std::string format_number(double x);

/// Verification of a found set against a reference set.
struct BankComparison {
    std::size_t matched = 0;
    std::size_t missed = 0;    // in reference, not found
    std::size_t spurious = 0;  // found, not in reference
};

[[nodiscard]] BankComparison compare_banks(const SolutionBank& found, const SolutionBank& reference, double tol = 1e-6);

}  // namespace foldcont
