//
// Copyright 2026 The stability-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stability/corrsamp.hpp"
#include "stability/crypto.hpp"
#include "stability/experiment.hpp"
#include "stability/learners.hpp"
#include "stability/transforms.hpp"

namespace py = pybind11;
using namespace stability;

namespace {

using Pairs = std::vector<std::pair<uint64_t, double>>;

FiniteDistribution from_pairs(const Pairs& pairs) {
  std::vector<Outcome> o;
  std::vector<double> p;
  for (const auto& [x, w] : pairs) {
    o.push_back(outcome_from_u64(x));
    p.push_back(w);
  }
  return FiniteDistribution(o, p);
}

Pairs to_pairs(const FiniteDistribution& d) {
  Pairs out;
  for (size_t i = 0; i < d.size(); ++i) {
    out.emplace_back(outcome_to_u64(d.outcomes()[i]), d.probs()[i]);
  }
  return out;
}

std::optional<uint64_t> maybe_u64(const Outcome& o) {
  if (o == kBottom) return std::nullopt;
  return outcome_to_u64(o);
}

mpz_class to_mpz(const py::int_& v) { return mpz_class(py::str(v).cast<std::string>()); }
py::int_ to_py(const mpz_class& v) { return py::int_(py::str(v.get_str())); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Replicable learning, privacy transformations and correlated sampling";

  py::class_<RandomTape>(m, "RandomTape")
      .def(py::init([](const std::string& hex) { return RandomTape(Seed::from_hex(hex)); }),
           py::arg("seed") = "0")
      .def("derive",
           [](const RandomTape& t, const std::vector<uint64_t>& path) {
             RandomTape out = t;
             for (uint64_t i : path) out = out.derive(i);
             return out;
           })
      .def("derive_one", [](const RandomTape& t, uint64_t i) { return t.derive(i); })
      .def("block", &RandomTape::block)
      .def("bits",
           [](const RandomTape& t, unsigned count) {
             TapeReader r(t);
             return r.bits(count);
           })
      .def("__eq__", [](const RandomTape& a, const RandomTape& b) { return a == b; });

  m.def("tv_distance", [](const Pairs& p, const Pairs& q) {
    return tv_distance(from_pairs(p), from_pairs(q));
  });
  m.def("consistent_sample", [](const Pairs& p, const RandomTape& tape) {
    return outcome_to_u64(consistent_sample(from_pairs(p), tape));
  });

  m.def("induced_distribution", [](unsigned in_bits, unsigned out_bits, std::vector<uint64_t> table) {
    return to_pairs(induced_distribution(TruthTableCircuit(in_bits, out_bits, std::move(table))));
  });
  m.def(
      "corr_samp",
      [](unsigned in_bits, unsigned out_bits, std::vector<uint64_t> table, double nu,
         const RandomTape& tape) {
        TruthTableCircuit c(in_bits, out_bits, std::move(table));
        py::gil_scoped_release release;
        return corr_samp(c, nu, InverterOracle::exact(), tape);
      },
      py::arg("in_bits"), py::arg("out_bits"), py::arg("table"), py::arg("nu"), py::arg("tape"));

  m.def(
      "r_finite_learn",
      [](const std::vector<std::string>& rows, const std::vector<std::pair<uint32_t, uint8_t>>& sample,
         double rho, double alpha, double beta, bool realizable, const RandomTape& tape) {
        FiniteClass cls = FiniteClass::from_strings(rows);
        auto params = LearnerParams::resolve(rho, alpha, beta, realizable, cls.size());
        LabeledSample s;
        for (const auto& [x, y] : sample) s.push_back({x, y});
        return r_finite_learn_on(cls, s, params, tape);
      },
      py::arg("rows"), py::arg("sample"), py::arg("rho"), py::arg("alpha"), py::arg("beta"),
      py::arg("realizable"), py::arg("tape"));
  m.def("learner_sample_size", [](double rho, double alpha, double beta, bool realizable,
                                  size_t class_size) {
    return LearnerParams::resolve(rho, alpha, beta, realizable, class_size).m;
  });

  m.def("dp_selection", [](const std::vector<uint64_t>& items, double eps, double delta,
                           const RandomTape& tape) {
    std::vector<Outcome> o;
    for (uint64_t v : items) o.push_back(outcome_from_u64(v));
    return maybe_u64(dp_selection(o, eps, delta, tape));
  });

  m.def("gm_keygen", [](unsigned bits, const RandomTape& tape) {
    GMKeys k = keygen(bits, tape);
    return py::make_tuple(to_py(k.pk.n), to_py(k.pk.x), to_py(k.sk.p), to_py(k.sk.q));
  });
  m.def("gm_enc", [](const py::int_& n, const py::int_& x, int bit, const RandomTape& tape) {
    return to_py(enc(GMPublicKey{to_mpz(n), to_mpz(x)}, bit, tape).value);
  });
  m.def("gm_dec", [](const py::int_& p, const py::int_& q, const py::int_& c) {
    return dec(GMSecretKey{to_mpz(p), to_mpz(q)}, GMCiphertext{to_mpz(c)});
  });

  m.def("suites", [] { return kSuites; });
  m.def(
      "run_suite_json",
      [](const std::string& config_json, const std::string& format) {
        ExperimentConfig c = config_from_json(config_json);
        Report r;
        {
          py::gil_scoped_release release;
          r = run_suite(c);
        }
        return py::make_tuple(emit_report(r, format == "csv" ? ReportFormat::kCsv : ReportFormat::kJson),
                              r.pass(), c.warnings);
      },
      py::arg("config_json"), py::arg("format") = "json");

  py::register_exception<std::invalid_argument>(m, "InvalidArgument", PyExc_ValueError);
}
