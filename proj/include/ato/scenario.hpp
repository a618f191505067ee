// scenario.hpp: Declarative scenario files (JSON) and their content fingerprint.
//
// {
//   "name": "qubit_qubit_resonant",
//   "system_energies": [0, 1],
//   "bath": {"ladder_spacing": 1.0, "levels": 2}      or  {"energies": [0, 0.37, 0.81]},
//   "beta": 1.0,
//   "hprime": [[[re, im], [re, im]], [[re, im], [re, im]]],
//   "rho_s": "gibbs" | {"basis_state": k} | {"matrix": <complex matrix literal>},
//   "epsilons": [0, 1e-2, 1e-3, 1e-4],
//   "seeds": [1, 2, 3],
//   "corrupt": {"levels": [0, 3], "angle": 0.785}           (optional negative control)
// }
//
// Complex matrix literals are row-major; each entry is [re, im] (a bare number is real).

#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ato/perturbation.hpp"
#include "ato/spectral.hpp"
#include "ato/thermal_ops.hpp"

namespace ato {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Corruption {
    std::size_t level_a{0};
    std::size_t level_b{0};
    double angle{0.0};
};

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Scenario {
public:
    enum class StateKind { Gibbs, BasisState, Matrix };

    static Scenario from_json(const nlohmann::json& j) {
        Scenario s;
        s.doc_ = j;
        s.parse();
        return s;
    }

    static Scenario parse_text(const std::string& text) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ScenarioError(std::string("scenario parse error: ") + e.what());
        }
        return from_json(j);
    }

    static Scenario load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ScenarioError("cannot open scenario file " + path.string());
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_text(buf.str());
    }

    const std::string& name() const noexcept { return name_; }
    double beta() const noexcept { return beta_; }
    const std::vector<double>& epsilons() const noexcept { return epsilons_; }
    const std::vector<std::uint64_t>& seeds() const noexcept { return seeds_; }
    const HamiltonianSpec& system() const noexcept { return system_; }
    const HamiltonianSpec& bath() const noexcept { return bath_; }
    const MatrixXcd& hprime() const noexcept { return hprime_; }
    const DensityMatrix& rho_s() const noexcept { return rho_; }
    StateKind state_kind() const noexcept { return state_kind_; }
    const std::optional<Corruption>& corruption() const noexcept { return corrupt_; }
    const nlohmann::json& document() const noexcept { return doc_; }

    CompositeIndexMap index_map() const { return {system_.dim(), bath_.dim()}; }

    PerturbationSetup setup(double eps) const { return {system_, hprime_, eps}; }

    void set_epsilons(std::vector<double> e) {
        doc_["epsilons"] = e;
        parse();
    }
    void set_seeds(std::vector<std::uint64_t> s) {
        doc_["seeds"] = s;
        parse();
    }

    // FNV-1a over the canonical (key-sorted, compact) JSON serialization.
    std::string fingerprint() const {
        std::ostringstream os;
        os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(doc_.dump());
        return os.str();
    }

private:
    static std::vector<double> real_list(const nlohmann::json& j, const char* what) {
        if (!j.is_array()) throw ScenarioError(std::string(what) + ": expected a list of numbers");
        std::vector<double> out;
        for (const auto& v : j) {
            if (!v.is_number()) throw ScenarioError(std::string(what) + ": expected a list of numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }

    static MatrixXcd matrix_literal(const nlohmann::json& j, const char* what) {
        if (!j.is_array() || j.empty()) throw ScenarioError(std::string(what) + ": malformed matrix literal");
        const std::size_t n = j.size();
        MatrixXcd m(static_cast<Index>(n), static_cast<Index>(n));
        for (std::size_t r = 0; r < n; ++r) {
            const auto& row = j[r];
            if (!row.is_array() || row.size() != n) {
                throw ScenarioError(std::string(what) + ": malformed matrix literal (rows must have " +
                                    std::to_string(n) + " entries)");
            }
            for (std::size_t c = 0; c < n; ++c) {
                const auto& x = row[c];
                cd v;
                if (x.is_number()) {
                    v = {x.get<double>(), 0.0};
                } else if (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number()) {
                    v = {x[0].get<double>(), x[1].get<double>()};
                } else {
                    throw ScenarioError(std::string(what) + ": malformed matrix literal (entry must be [re, im])");
                }
                m(static_cast<Index>(r), static_cast<Index>(c)) = v;
            }
        }
        return m;
    }

    void parse() {
        const auto& j = doc_;
        if (!j.is_object()) throw ScenarioError("scenario: top level must be an object");
        auto req = [&](const char* key) -> const nlohmann::json& {
            if (!j.contains(key)) throw ScenarioError(std::string("scenario: missing key '") + key + "'");
            return j.at(key);
        };
        try {
            name_ = j.value("name", std::string("unnamed"));

            auto se = real_list(req("system_energies"), "system_energies");
            if (!std::is_sorted(se.begin(), se.end())) throw ScenarioError("system_energies must be ascending");
            system_ = HamiltonianSpec::diagonal(se);

            const auto& b = req("bath");
            std::vector<double> be;
            if (b.contains("energies")) {
                be = real_list(b.at("energies"), "bath.energies");
                std::sort(be.begin(), be.end());
            } else if (b.contains("ladder_spacing") && b.contains("levels")) {
                const double sp = b.at("ladder_spacing").get<double>();
                const auto n = b.at("levels").get<int>();
                if (n <= 0 || !(sp > 0.0)) throw ScenarioError("bath ladder needs positive spacing and levels");
                for (int k = 0; k < n; ++k) be.push_back(sp * k);
            } else {
                throw ScenarioError("bath: give either 'energies' or 'ladder_spacing' + 'levels'");
            }
            if (be.empty()) throw ScenarioError("bath: empty spectrum");
            bath_ = HamiltonianSpec::diagonal(be);
            if (system_.dim() * bath_.dim() > default_policy.max_composite_dim) {
                throw ScenarioError("scenario: composite dimension exceeds the configured cap");
            }

            beta_ = req("beta").get<double>();
            if (!(beta_ > 0.0)) throw ScenarioError("beta must be positive");

            hprime_ = matrix_literal(req("hprime"), "hprime");
            if (static_cast<std::size_t>(hprime_.rows()) != system_.dim()) {
                throw ScenarioError("hprime: dimension does not match system_energies");
            }
            if (hermiticity_defect(hprime_) > default_policy.structural) throw ScenarioError("hprime: not Hermitian");

            const auto& r = req("rho_s");
            if (r.is_string() && r.get<std::string>() == "gibbs") {
                state_kind_ = StateKind::Gibbs;
                rho_ = gibbs_state(system_, beta_);
            } else if (r.is_object() && r.contains("basis_state")) {
                state_kind_ = StateKind::BasisState;
                rho_ = DensityMatrix::basis_state(system_.dim(), r.at("basis_state").get<std::size_t>());
            } else if (r.is_object() && r.contains("matrix")) {
                state_kind_ = StateKind::Matrix;
                MatrixXcd m = matrix_literal(r.at("matrix"), "rho_s.matrix");
                if (static_cast<std::size_t>(m.rows()) != system_.dim()) {
                    throw ScenarioError("rho_s: dimension does not match system_energies");
                }
                if (auto why = state_violation(m)) throw ScenarioError("rho_s: " + *why);
                rho_ = DensityMatrix(std::move(m));
            } else {
                throw ScenarioError("rho_s: expected \"gibbs\", {\"basis_state\": k} or {\"matrix\": ...}");
            }

            epsilons_ = real_list(req("epsilons"), "epsilons");
            for (double e : epsilons_)
                if (!(e >= 0.0 && e <= 1.0)) throw ScenarioError("epsilons must lie in [0, 1]");
            seeds_.clear();
            const auto& sd = req("seeds");
            if (!sd.is_array() || sd.empty()) throw ScenarioError("seeds: expected a non-empty list of integers");
            for (const auto& v : sd) {
                if (!v.is_number_integer()) throw ScenarioError("seeds: expected integers");
                seeds_.push_back(v.get<std::uint64_t>());
            }

            corrupt_.reset();
            if (j.contains("corrupt")) {
                const auto& c = j.at("corrupt");
                const auto lv = c.at("levels");
                if (!lv.is_array() || lv.size() != 2) throw ScenarioError("corrupt.levels must hold two indices");
                corrupt_ = Corruption{lv[0].get<std::size_t>(), lv[1].get<std::size_t>(), c.at("angle").get<double>()};
                const std::size_t dim = system_.dim() * bath_.dim();
                if (corrupt_->level_a >= dim || corrupt_->level_b >= dim || corrupt_->level_a == corrupt_->level_b) {
                    throw ScenarioError("corrupt.levels out of range");
                }
            }
        } catch (const nlohmann::json::exception& e) {
            throw ScenarioError(std::string("scenario: ") + e.what());
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(std::string("scenario: ") + e.what());
        }
    }

    nlohmann::json doc_;
    std::string name_;
    double beta_{1.0};
    std::vector<double> epsilons_;
    std::vector<std::uint64_t> seeds_;
    HamiltonianSpec system_;
    HamiltonianSpec bath_;
    MatrixXcd hprime_;
    DensityMatrix rho_;
    StateKind state_kind_{StateKind::Gibbs};
    std::optional<Corruption> corrupt_;
};

inline std::vector<std::filesystem::path> scenario_files(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir)) return out;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace ato
