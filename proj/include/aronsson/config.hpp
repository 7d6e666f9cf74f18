#pragma once

#include "aronsson/field.hpp"

#include <map>
#include <string>
#include <vector>

namespace aronsson {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Plain-text `key = value` configuration with [section] headers. Keys are
/// addressed as "section.key"; entries before any header live in the
/// global section and are addressed by their bare name.
class Config {
public:
    static Config parse(const std::string& text);
    static Config load_file(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::vector<double> get_list(const std::string& key) const;
    std::vector<Vec2> get_points(const std::string& key) const;  // "x,y;x,y;..."

    void set(const std::string& key, const std::string& value);

    /// Rejects keys that are not in the allowed set; unknown keys are
    /// configuration errors, not warnings.
    void require_known(const std::vector<std::string>& allowed) const;

    /// Canonical serialized form (sorted keys); input to the config hash
    /// and sufficient to reproduce the run.
    std::string canonical_text() const;

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
};

/// Field catalog used by the CLI:
///   plane:px,py[,b] | cone:k[,b] | cone_neg:k[,b] | paraboloid:s |
///   perturbed_cone:k,amp,freq | perturbed_cone15:k,amp,freq |
///   aronsson43 | aronsson43t | const:c | grid:PATH
/// cone_neg:k,b is b - C_k^{H^}; aronsson43t composes the 4/3 profile with
/// A^{-1/2} for anisotropic Hamiltonians.
Field make_field(const std::string& spec, const DomainDesc& domain, const Hamiltonian& H);

/// "disk:cx,cy,R" | "annulus:cx,cy,rin,rout"
DomainDesc parse_domain(const std::string& spec);

/// Grid persistence with exact value round-trip.
void save_grid_json(const Grid2& g, const std::string& path);
Grid2 load_grid_json(const std::string& path);

}  // namespace aronsson
