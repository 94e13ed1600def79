#include "qplab/cli.hpp"
#include "qplab/cocycle.hpp"
#include "qplab/renorm_engine.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qplab;

namespace {

py::int_ to_py(const BigInt& x) { return py::int_(py::reinterpret_steal<py::object>(PyLong_FromString(x.get_str().c_str(), nullptr, 10))); }

BigInt from_py(const py::int_& x) { return BigInt(py::str(py::handle(x)).cast<std::string>()); }

std::vector<BigInt> from_py(const std::vector<py::int_>& xs) {
    std::vector<BigInt> out;
    for (const auto& x : xs) out.push_back(from_py(x));
    return out;
}

cli::RunConfig config_from(const std::string& text) {
    return text.empty() ? cli::default_config() : cli::parse_config(text);
}

cf::Frequency frequency(const std::vector<py::int_>& elements, const std::vector<py::int_>& closure, Bits bits) {
    return cf::Frequency(from_py(elements), bits, from_py(closure));
}

}  // namespace

PYBIND11_MODULE(qplab, m) {
    m.doc() = "Quasi-periodic cocycle lab: continued fractions, phase renormalisation and cocycle products.";

    static py::exception<Error> error(m, "Error");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyObject* type = error.ptr();
            py::object instance = py::reinterpret_steal<py::object>(PyObject_CallFunction(type, "s", e.what()));
            instance.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(type, instance.ptr());
        }
    });

    m.def(
        "cf_expand",
        [](const std::string& decimal, std::size_t depth, Bits bits) {
            cf::Frequency f = cf::cf_expand_decimal(decimal, depth, bits);
            std::vector<py::int_> out;
            for (const auto& a : f.elements()) out.push_back(to_py(a));
            return out;
        },
        py::arg("decimal"), py::arg("depth"), py::arg("bits") = 256);

    m.def(
        "convergents",
        [](const std::vector<py::int_>& elements, std::size_t L, const std::vector<py::int_>& closure, Bits bits) {
            std::vector<std::pair<py::int_, py::int_>> out;
            for (const auto& r : cf::convergents(frequency(elements, closure, bits), L).rows)
                out.emplace_back(to_py(r.p), to_py(r.q));
            return out;
        },
        py::arg("elements"), py::arg("L"), py::arg("closure") = std::vector<py::int_>{py::int_(1)},
        py::arg("bits") = 256);

    m.def(
        "khinchin_mean",
        [](const std::vector<py::int_>& elements, std::size_t L) {
            return cf::khinchin_mean(frequency(elements, {py::int_(1)}, 256), L).to_double();
        },
        py::arg("elements"), py::arg("L"));

    m.def(
        "lyapunov",
        [](const std::string& lambda, const std::string& theta, const std::vector<std::int64_t>& horizons,
           const std::string& kind, const std::vector<py::int_>& elements, const std::string& energy, Bits bits) {
            cf::Frequency f = elements.empty() ? cf::Frequency::golden(64, 256)
                                               : frequency(elements, {py::int_(1)}, 256);
            Real omega = cf::cf_value(f, 0, bits);
            Real lam(cf::parse_decimal(lambda), bits);
            cocycle::CocycleKind k = kind == "amo"
                                         ? cocycle::CocycleKind::amo(lam, omega, Real(cf::parse_decimal(energy), bits))
                                         : cocycle::CocycleKind::model(lam, omega);
            if (kind != "amo" && kind != "model") fail(ErrorCode::ValueError, "kind must be model or amo");
            cocycle::ProductOptions opt;
            opt.bits = bits;
            std::vector<double> out;
            for (const auto& v :
                 cocycle::lyapunov_estimate(k, Real(cf::parse_decimal(theta), bits), horizons,
                                            cocycle::Direction::Forward, opt)
                     .values)
                out.push_back(v.to_double());
            return out;
        },
        py::arg("lambda_"), py::arg("theta"), py::arg("horizons"), py::arg("kind") = "model",
        py::arg("elements") = std::vector<py::int_>{}, py::arg("energy") = "0", py::arg("bits") = 128);

    m.def(
        "renorm_residual",
        [](const std::string& lambda, const std::string& theta, std::int64_t k, Bits bits) {
            Real omega = cf::cf_value(cf::Frequency::golden(64, 256), 0, bits);
            renorm::RenormResidual r = renorm::renorm_residual(Real(cf::parse_decimal(lambda), bits), omega,
                                                               Real(cf::parse_decimal(theta), bits), k, bits);
            py::dict d;
            d["k1"] = to_py(r.k1);
            d["residual"] = r.residual;
            d["sign"] = r.sign;
            d["working_bits"] = r.working_bits;
            return d;
        },
        py::arg("lambda_"), py::arg("theta"), py::arg("k"), py::arg("bits") = 128);

    m.def(
        "parse_config", [](const std::string& text) { return cli::to_json(cli::parse_config(text)).dump(); },
        py::arg("text"), "Validates a JSON configuration and returns it with defaults filled in.");

    m.def(
        "run_command",
        [](const std::string& name, const std::string& config, const std::string& format) {
            cli::RunConfig c = config_from(config);
            return cli::render(cli::run_command(name, c), format);
        },
        py::arg("name"), py::arg("config") = "", py::arg("format") = "csv");

    m.def("command_names", &cli::command_names);
    m.def("criterion_names", &cli::criterion_names);

    m.def(
        "run_suite",
        [](const std::vector<std::string>& selection, const std::string& config, const std::string& out_dir) {
            cli::SuiteReport r;
            {
                py::gil_scoped_release release;
                r = cli::run_suite(config_from(config), selection, out_dir);
            }
            py::list out;
            for (const auto& x : r.results) {
                py::dict d;
                d["index"] = x.index;
                d["name"] = x.name;
                d["passed"] = x.passed;
                d["measured"] = x.measured;
                d["threshold"] = x.threshold;
                d["detail"] = x.detail;
                d["runtime_seconds"] = x.runtime_seconds;
                out.append(d);
            }
            return out;
        },
        py::arg("selection"), py::arg("config") = "", py::arg("out_dir") = "");
}
