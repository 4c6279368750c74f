#include "foldcont/solution_bank.hpp"

#include "foldcont/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace foldcont {

OrthantSignature::OrthantSignature(std::vector<signed char> signs) : signs_(std::move(signs))
{
    for (auto s : signs_)
        if (s != 1 && s != -1) throw std::invalid_argument("OrthantSignature: entries must be +1 or -1");
}

OrthantSignature OrthantSignature::from_bits(std::size_t n, unsigned long long bits)
{
    std::vector<signed char> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = ((bits >> i) & 1ULL) ? 1 : -1;
    return OrthantSignature(std::move(s));
}

OrthantSignature OrthantSignature::parse(const std::string& text)
{
    std::vector<signed char> s;
    for (char c : text) {
        if (c == '+')
            s.push_back(1);
        else if (c == '-')
            s.push_back(-1);
        else
            throw std::invalid_argument("OrthantSignature: bad character in '" + text + "'");
    }
    return OrthantSignature(std::move(s));
}

OrthantSignature OrthantSignature::of(const Vector& u)
{
    std::vector<signed char> s(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) s[i] = u[i] < 0 ? -1 : 1;
    return OrthantSignature(std::move(s));
}

OrthantSignature OrthantSignature::flipped(std::size_t i) const
{
    OrthantSignature o = *this;
    o.signs_[i] = static_cast<signed char>(-o.signs_[i]);
    return o;
}

std::string OrthantSignature::str() const
{
    std::string s;
    s.reserve(signs_.size());
    for (auto x : signs_) s.push_back(x > 0 ? '+' : '-');
    return s;
}

bool OrthantSignature::admits(const Vector& u, double tol) const
{
    if (u.size() != signs_.size()) return false;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (std::abs(u[i]) <= tol) continue;
        if ((u[i] > 0) != (signs_[i] > 0)) return false;
    }
    return true;
}

const char* to_string(Provenance p) noexcept
{
    switch (p) {
    case Provenance::oracle: return "oracle";
    case Provenance::diagram: return "diagram";
    case Provenance::sampling: return "sampling";
    case Provenance::multistart: return "multistart";
    case Provenance::continuation: return "continuation";
    }
    return "unknown";
}

SolutionBank::SolutionBank(double dedup_tol, double max_residual) : dedup_tol_(dedup_tol), max_residual_(max_residual)
{
}

bool SolutionBank::insert(SolutionRecord record)
{
    if (!(record.residual < max_residual_)) return false;
    if (find(record.u, dedup_tol_)) return false;
    records_.push_back(std::move(record));
    return true;
}

std::size_t SolutionBank::merge(const SolutionBank& other)
{
    std::size_t added = 0;
    for (const auto& r : other.records_) added += insert(r) ? 1 : 0;
    return added;
}

std::optional<std::size_t> SolutionBank::find(const Vector& u, double tol) const
{
    for (std::size_t i = 0; i < records_.size(); ++i)
        if (records_[i].u.size() == u.size() && distance_inf(records_[i].u, u) <= tol) return i;
    return std::nullopt;
}

std::vector<std::size_t> SolutionBank::morse_histogram() const
{
    std::vector<std::size_t> h;
    for (const auto& r : records_) {
        if (h.size() <= r.morse_index) h.resize(r.morse_index + 1, 0);
        ++h[r.morse_index];
    }
    return h;
}

void SolutionBank::sort_canonical()
{
    std::stable_sort(records_.begin(), records_.end(), [](const SolutionRecord& a, const SolutionRecord& b) {
        if (a.morse_index != b.morse_index) return a.morse_index < b.morse_index;
        return std::lexicographical_compare(a.u.begin(), a.u.end(), b.u.begin(), b.u.end());
    });
}

std::string format_number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_bank_csv(const SolutionBank& bank, std::ostream& out)
{
    const std::size_t n = bank.empty() ? 0 : bank.records().front().u.size();
    out << "index,morse,residual,signature";
    for (std::size_t i = 1; i <= n; ++i) out << ",u_" << i;
    out << '\n';
    std::size_t idx = 0;
    for (const auto& r : bank.records()) {
        out << idx++ << ',' << r.morse_index << ',' << format_number(r.residual) << ','
            << (r.signature ? r.signature->str() : std::string());
        for (double x : r.u) out << ',' << format_number(x);
        out << '\n';
    }
}

SolutionBank read_bank_csv(std::istream& in, double dedup_tol)
{
    std::string line;
    if (!std::getline(in, line) || line.rfind("index,morse,residual,signature", 0) != 0)
        throw ConfigError("bank CSV: missing header");
    // keep every stored record, whatever its residual
    SolutionBank bank(dedup_tol, INFINITY);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (cells.size() < 4) throw ConfigError("bank CSV: short row");
        SolutionRecord r;
        try {
            r.morse_index = std::stoul(cells[1]);
            r.residual = std::stod(cells[2]);
            if (!cells[3].empty()) r.signature = OrthantSignature::parse(cells[3]);
            std::vector<double> u;
            for (std::size_t i = 4; i < cells.size(); ++i) u.push_back(std::stod(cells[i]));
            r.u = Vector(std::move(u));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("bank CSV: ") + e.what());
        }
        bank.insert(std::move(r));
    }
    return bank;
}

BankComparison compare_banks(const SolutionBank& found, const SolutionBank& reference, double tol)
{
    BankComparison c;
    for (const auto& r : reference.records()) {
        if (found.contains(r.u, tol))
            ++c.matched;
        else
            ++c.missed;
    }
    for (const auto& r : found.records())
        if (!reference.contains(r.u, tol)) ++c.spurious;
    return c;
}

}  // namespace foldcont
