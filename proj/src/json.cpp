#include "predmm/json.hpp"

#include <stdexcept>

namespace predmm {

namespace {

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <class T>
std::optional<T> get_optional(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->template get<T>();
}

}  // namespace

MarketMakerState market_maker_from_json(const json& j) {
    auto kind = j.at("kind").get<std::string>();
    if (kind == "lmsr") return j.get<lmsr::LmsrState>();
    if (kind == "bmm" || kind == "zp") {
        auto state = j.get<bmm::BmmState>();
        if (kind == "zp") state.params.adaptive = false;
        return state;
    }
    throw std::invalid_argument("unknown market maker kind: " + kind);
}

json market_maker_to_json(const MarketMakerState& mm) {
    json j = std::visit([](const auto& s) { return json(s); }, mm);
    j["kind"] = kind_name(mm);
    return j;
}

}  // namespace predmm

namespace predmm::lmsr {

void to_json(nlohmann::json& j, const LmsrState& s) { j = {{"q", s.q}, {"b", s.b}, {"scale", s.scale}}; }

void from_json(const nlohmann::json& j, LmsrState& s) {
    LmsrState d;
    s.q = j.value("q", d.q);
    s.b = j.value("b", d.b);
    s.scale = j.value("scale", d.scale);
    s.validate();
}

}  // namespace predmm::lmsr

namespace predmm::bmm {

void to_json(nlohmann::json& j, const BmmBelief& b) {
    j = {{"mu", b.mu}, {"sigma", b.sigma}, {"sigma_eps", b.sigma_eps}, {"sigma_cap", b.sigma_cap}};
}

void from_json(const nlohmann::json& j, BmmBelief& b) {
    BmmBelief d;
    b.mu = j.value("mu", d.mu);
    b.sigma = j.value("sigma", d.sigma);
    b.sigma_eps = j.value("sigma_eps", d.sigma_eps);
    b.sigma_cap = j.value("sigma_cap", d.sigma_cap);
    b.validate();
}

void to_json(nlohmann::json& j, const RangeObservation& o) {
    j = nlohmann::json::object();
    j["lower"] = o.lower ? nlohmann::json(*o.lower) : nlohmann::json(nullptr);
    j["upper"] = o.upper ? nlohmann::json(*o.upper) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, RangeObservation& o) {
    o.lower = get_optional<double>(j, "lower");
    o.upper = get_optional<double>(j, "upper");
}

void to_json(nlohmann::json& j, const BmmParams& p) {
    j = {{"window", p.window},
         {"alpha", p.alpha},
         {"adaptive", p.adaptive},
         {"doubling_multiplier", p.doubling_multiplier},
         {"commit_ladder_on_accept", p.commit_ladder_on_accept},
         {"quadrature_nodes", p.quadrature.node_count},
         {"quadrature_half_width", p.quadrature.half_width_sigmas}};
}

void from_json(const nlohmann::json& j, BmmParams& p) {
    BmmParams d;
    p.window = j.value("window", d.window);
    p.alpha = j.value("alpha", d.alpha);
    p.adaptive = j.value("adaptive", d.adaptive);
    p.doubling_multiplier = j.value("doubling_multiplier", d.doubling_multiplier);
    p.commit_ladder_on_accept = j.value("commit_ladder_on_accept", d.commit_ladder_on_accept);
    p.quadrature.node_count = j.value("quadrature_nodes", d.quadrature.node_count);
    p.quadrature.half_width_sigmas = j.value("quadrature_half_width", d.quadrature.half_width_sigmas);
    p.validate();
}

void to_json(nlohmann::json& j, const BmmState& s) {
    j = {{"belief", s.belief}, {"window_obs", s.window}, {"params", s.params}};
}

// Accepts both the nested encoding produced above and a flat config such as
// {"mu": 50, "sigma": 12, "window": 10}.
void from_json(const nlohmann::json& j, BmmState& s) {
    s.belief = j.contains("belief") ? j.at("belief").get<BmmBelief>() : j.get<BmmBelief>();
    s.params = j.contains("params") ? j.at("params").get<BmmParams>() : j.get<BmmParams>();
    s.window = j.value("window_obs", std::vector<RangeObservation>{});
    s.validate();
}

}  // namespace predmm::bmm

namespace predmm::walk {

void to_json(nlohmann::json& j, const ShockChange& c) {
    j = nlohmann::json::object();
    put_optional(j, "p_lr", c.p_lr);
    put_optional(j, "p_tb", c.p_tb);
    put_optional(j, "S", c.half_width);
    put_optional(j, "x0", c.x0);
    put_optional(j, "y0", c.y0);
}

void from_json(const nlohmann::json& j, ShockChange& c) {
    c.p_lr = get_optional<double>(j, "p_lr");
    c.p_tb = get_optional<double>(j, "p_tb");
    c.half_width = get_optional<int>(j, "S");
    c.x0 = get_optional<int>(j, "x0");
    c.y0 = get_optional<int>(j, "y0");
}

void to_json(nlohmann::json& j, const Shock& s) {
    j = {{"at_ms", s.at_ms}, {"probability", s.probability}, {"change", s.change}};
    put_optional(j, "latest_ms", s.latest_ms);
}

void from_json(const nlohmann::json& j, Shock& s) {
    s.at_ms = j.at("at_ms").get<std::int64_t>();
    s.latest_ms = get_optional<std::int64_t>(j, "latest_ms");
    s.probability = j.value("probability", 1.0);
    s.change = j.at("change").get<ShockChange>();
}

void to_json(nlohmann::json& j, const WalkConfig& c) {
    j = {{"p_lr", c.p_lr},       {"p_tb", c.p_tb}, {"S", c.half_width},
         {"x0", c.x0},           {"y0", c.y0},     {"step_interval_ms", c.step_interval_ms},
         {"shocks", c.shocks}};
}

void from_json(const nlohmann::json& j, WalkConfig& c) {
    WalkConfig d;
    c.p_lr = j.value("p_lr", d.p_lr);
    c.p_tb = j.value("p_tb", d.p_tb);
    c.half_width = j.value("S", d.half_width);
    c.x0 = j.value("x0", d.x0);
    c.y0 = j.value("y0", d.y0);
    c.step_interval_ms = j.value("step_interval_ms", d.step_interval_ms);
    c.shocks = j.value("shocks", std::vector<Shock>{});
    c.validate();
}

void to_json(nlohmann::json& j, const EdgeHits& h) {
    j = {{"left", h.left}, {"right", h.right}, {"top", h.top}, {"bottom", h.bottom}};
}

void from_json(const nlohmann::json& j, EdgeHits& h) {
    h.left = j.at("left").get<std::uint64_t>();
    h.right = j.at("right").get<std::uint64_t>();
    h.top = j.at("top").get<std::uint64_t>();
    h.bottom = j.at("bottom").get<std::uint64_t>();
}

void to_json(nlohmann::json& j, const WalkState& s) {
    j = {{"x", s.x}, {"y", s.y}, {"hits", s.hits}, {"step", s.elapsed_steps}};
}

void from_json(const nlohmann::json& j, WalkState& s) {
    s.x = j.at("x").get<int>();
    s.y = j.at("y").get<int>();
    s.hits = j.at("hits").get<EdgeHits>();
    s.elapsed_steps = j.at("step").get<std::uint64_t>();
}

}  // namespace predmm::walk
