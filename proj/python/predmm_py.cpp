#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "predmm/bmm.hpp"
#include "predmm/json.hpp"
#include "predmm/lmsr.hpp"
#include "predmm/metrics.hpp"
#include "predmm/numerics.hpp"
#include "predmm/sim.hpp"
#include "predmm/walk.hpp"

namespace py = pybind11;
using namespace predmm;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict simulate(const std::string& mm, const std::string& jumps, std::uint64_t seed, int steps, double p_jump,
                  double sigma_jump, double sigma_eps, double b, std::size_t window, double alpha) {
    sim::SimConfig c;
    c.steps = steps;
    c.jumps = sim::jump_kind_from_string(jumps);
    c.p_jump = p_jump;
    c.sigma_jump = sigma_jump;
    c.sigma_eps = sigma_eps;
    c.seed = seed;
    MarketMakerState state;
    if (mm == "lmsr") {
        state = lmsr::LmsrState{0.0, b, 100.0};
    } else if (mm == "bmm" || mm == "zp") {
        bmm::BmmState s;
        s.belief = {c.init_mean, c.init_sd, sigma_eps};
        s.params.window = window;
        s.params.alpha = alpha;
        s.params.adaptive = mm == "bmm";
        state = s;
    } else {
        throw std::invalid_argument("unknown market maker: " + mm);
    }
    sim::SimResult r;
    {
        py::gil_scoped_release release;
        r = sim::run_simulation(c, state);
    }
    py::list series;
    for (const auto& s : r.series) series.append(py::make_tuple(s.step, s.truth, s.spot, s.spread));
    py::list log;
    for (const auto& e : r.log) log.append(to_line(e));
    py::dict out;
    out["metrics"] = to_python(r.metrics.to_json());
    out["series"] = series;
    out["log"] = log;
    return out;
}

py::dict replay_metrics(const std::vector<std::string>& lines, const std::string& market, double probe_qty,
                        bool half_spread) {
    std::string text;
    for (const auto& l : lines) text += l + "\n";
    std::istringstream in(text);
    auto events = read_log(in);
    auto m = metrics::compute_metrics(events, market, metrics::truth_from_log(events, market), {probe_qty, half_spread});
    return to_python(m.to_json());
}

}  // namespace

PYBIND11_MODULE(_predmm, m) {
    m.doc() = "Market-maker numerics and simulations";

    py::register_exception<MalformedLog>(m, "MalformedLog", PyExc_ValueError);

    auto num = m.def_submodule("numerics");
    num.def("std_normal_cdf", &numerics::std_normal_cdf);
    num.def("std_normal_sf", &numerics::std_normal_sf);
    num.def("hazard", &numerics::hazard);
    num.def("find_root", &numerics::find_root, py::arg("f"), py::arg("lo"), py::arg("hi"), py::arg("tol"));
    num.def(
        "integrate_gaussian_weighted",
        [](const std::function<double(double)>& g, double center, double scale, int node_count, double half_width) {
            return numerics::integrate_gaussian_weighted(g, center, scale, {node_count, half_width});
        },
        py::arg("g"), py::arg("center"), py::arg("scale"), py::arg("node_count") = 64,
        py::arg("half_width_sigmas") = 8.0);

    auto lm = m.def_submodule("lmsr");
    py::class_<lmsr::LmsrState>(lm, "State")
        .def(py::init([](double q, double b, double scale) { return lmsr::LmsrState{q, b, scale}; }), py::arg("q") = 0.0,
             py::arg("b") = 125.0, py::arg("scale") = 100.0)
        .def_readwrite("q", &lmsr::LmsrState::q)
        .def_readwrite("b", &lmsr::LmsrState::b)
        .def_readwrite("scale", &lmsr::LmsrState::scale);
    lm.def("spot_price", &lmsr::spot_price);
    lm.def("trade_cost", &lmsr::trade_cost);
    lm.def("quote_vwap", [](const lmsr::LmsrState& s, const std::string& side, double qty) {
        return lmsr::quote_vwap(s, side_from_string(side), qty);
    });
    lm.def("spread", &lmsr::spread);
    lm.def("loss_bound", &lmsr::loss_bound, py::arg("b"), py::arg("scale") = 100.0);

    auto bm = m.def_submodule("bmm");
    py::class_<bmm::BmmBelief>(bm, "Belief")
        .def(py::init([](double mu, double sigma, double sigma_eps) { return bmm::BmmBelief{mu, sigma, sigma_eps}; }),
             py::arg("mu") = 50.0, py::arg("sigma") = 12.0, py::arg("sigma_eps") = 5.0)
        .def_readwrite("mu", &bmm::BmmBelief::mu)
        .def_readwrite("sigma", &bmm::BmmBelief::sigma)
        .def_readwrite("sigma_eps", &bmm::BmmBelief::sigma_eps);
    bm.def("q_function", &bmm::q_function);
    bm.def("ask_price", &bmm::ask_price);
    bm.def("bid_price", &bmm::bid_price);
    bm.def(
        "range_update",
        [](const bmm::BmmBelief& b, std::optional<double> lower, std::optional<double> upper) {
            return bmm::range_update(b, {lower, upper});
        },
        py::arg("belief"), py::arg("lower") = py::none(), py::arg("upper") = py::none());

    auto wk = m.def_submodule("walk");
    wk.def("analytic_value", &walk::analytic_value, py::arg("p"), py::arg("half_width"), py::arg("x0"));

    m.def("simulate", &simulate, py::arg("mm") = "bmm", py::arg("jumps") = "gaussian", py::arg("seed") = 1,
          py::arg("steps") = 200, py::arg("p_jump") = 0.01, py::arg("sigma_jump") = 5.0, py::arg("sigma_eps") = 5.0,
          py::arg("b") = 125.0, py::arg("window") = 5, py::arg("alpha") = 1.0);
    m.def("replay_metrics", &replay_metrics, py::arg("lines"), py::arg("market") = sim::kMarket,
          py::arg("probe_qty") = 20.0, py::arg("half_spread") = true);
}
