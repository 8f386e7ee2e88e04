#include "glwalk/config.hpp"

#include <cstdlib>
#include <fstream>

#include "glwalk/errors.hpp"

namespace glwalk {

namespace {

Mat mat_from_json(const nlohmann::json& j, int d) {
    // Row-major matrix literal: flat array of d*d reals.
    if (!j.is_array() || j.size() != static_cast<std::size_t>(d * d))
        throw ConfigError("ensemble: atom must be a row-major array of d*d reals");
    Mat m = Mat::zero(d);
    for (int i = 0; i < d * d; ++i) m.a[static_cast<std::size_t>(i)] = j[static_cast<std::size_t>(i)].get<double>();
    return m;
}

ZLaw zlaw_from_json(const nlohmann::json& j) {
    ZLaw law;
    std::string kind = j.value("kind", "two_point");
    if (kind == "two_point") {
        law.kind = ZLaw::Kind::two_point;
        law.z1 = j.at("z1").get<double>();
        law.z2 = j.at("z2").get<double>();
        law.p1 = j.value("p1", 0.5);
        if (!(law.p1 > 0.0 && law.p1 < 1.0)) throw ConfigError("z_law: p1 must be in (0,1)");
    } else if (kind == "exponential") {
        law.kind = ZLaw::Kind::exponential;
        law.rate = j.value("rate", 1.0);
        if (!(law.rate > 0.0)) throw ConfigError("z_law: rate must be positive");
    } else if (kind == "uniform") {
        law.kind = ZLaw::Kind::uniform;
        law.lo = j.at("lo").get<double>();
        law.hi = j.at("hi").get<double>();
        if (!(law.hi > law.lo)) throw ConfigError("z_law: hi must exceed lo");
    } else {
        throw ConfigError("z_law: unknown kind " + kind);
    }
    return law;
}

} // namespace

EnsembleSpec ensemble_from_json(const nlohmann::json& j) {
    int d = j.value("d", 2);
    Family family = family_from_name(j.at("family").get<std::string>());
    switch (family) {
        case Family::two_atom: {
            const auto& atoms = j.at("atoms");
            if (!atoms.is_array() || atoms.size() != 2)
                throw ConfigError("two_atom: 'atoms' must list exactly two matrices");
            return EnsembleSpec::two_atom(mat_from_json(atoms[0], d), mat_from_json(atoms[1], d),
                                          j.value("declared_q", 2.0));
        }
        case Family::scalar_gauge:
            return EnsembleSpec::scalar_gauge(d, zlaw_from_json(j.at("z_law")),
                                              j.value("declared_q", 2.0));
        case Family::rot_diag_rot:
            return EnsembleSpec::rot_diag_rot(d, j.at("tail_index").get<double>(),
                                              j.at("declared_q").get<double>());
        case Family::orthogonal_only:
            return EnsembleSpec::orthogonal_only(d);
    }
    throw ConfigError("ensemble: unreachable family");
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (!j.contains("seed")) throw ConfigError("config: 'seed' is mandatory (no wall-clock default)");
    c.seed = j.at("seed").get<std::uint64_t>();
    c.ensemble = ensemble_from_json(j.at("ensemble"));
    c.workers = j.value("workers", 1);
    if (c.workers < 1) throw ConfigError("config: workers must be >= 1");
    c.output_dir = j.value("output_dir", "out");
    c.budget = j.value("budget", static_cast<std::int64_t>(10'000'000'000LL));
    if (c.budget < 1) throw ConfigError("config: budget must be positive");
    c.burn_in = j.value("burn_in", 200);
    if (c.burn_in < 1) throw ConfigError("config: burn_in must be >= 1");
    c.invariance_level = j.value("invariance_level", 0.05);
    c.raw = j;

    // Environment override for the step budget.
    if (const char* env = std::getenv("GLWALK_BUDGET")) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end == env || v < 1.0) throw ConfigError("GLWALK_BUDGET: not a positive number");
        c.budget = static_cast<std::int64_t>(v);
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    try {
        return from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

const nlohmann::json& ExperimentConfig::block(const std::string& name) const {
    if (!raw.contains(name))
        throw ConfigError("config: missing block '" + name + "' for the chosen command");
    return raw.at(name);
}

} // namespace glwalk
