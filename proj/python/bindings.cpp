#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "eqr/divergence.hpp"
#include "eqr/error.hpp"
#include "eqr/features.hpp"
#include "eqr/metrics.hpp"
#include "eqr/model_selection.hpp"
#include "eqr/pattern_analysis.hpp"
#include "eqr/reasoning_dynamics.hpp"
#include "eqr/step_distributions.hpp"
#include "eqr/synthetic.hpp"
#include "eqr/trace_model.hpp"
#include "json.hpp"

namespace py = pybind11;
using namespace eqr;

namespace {

using Matrix = std::vector<std::vector<double>>;

StepLogits to_logits(const Matrix& rows) {
  StepLogits s;
  s.token_count = rows.size();
  s.vocab_size = rows.empty() ? 0 : rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != s.vocab_size) throw Error(ErrorCode::kLengthMismatch, "ragged logit rows");
    s.values.insert(s.values.end(), r.begin(), r.end());
  }
  return s;
}

py::list rows_to_py(const QuantifiedChain& q) {
  py::list out;
  for (const auto& r : q.rows) {
    py::dict d;
    d["step_index"] = r.step_index;
    d["kl"] = r.kl;
    d["js"] = r.js;
    d["hellinger"] = r.hellinger;
    d["cosine"] = r.cosine;
    d["entropy_diff"] = r.entropy_diff;
    out.append(d);
  }
  return out;
}

SmoothingConfig smoothing(double epsilon, bool renormalize) {
  SmoothingConfig cfg;
  cfg.epsilon = epsilon;
  cfg.renormalize = renormalize;
  return cfg;
}

SynthProfile profile_for(bool volatile_, bool converge, std::size_t vocab) {
  auto p = volatile_ ? volatile_profile() : coherent_profile();
  p.vocab_size = vocab;
  p.converge_to_final = converge;
  return p;
}

std::vector<double> probs_of(const Step& s) { return to_distribution(s).probs; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Step-wise divergence analysis of reasoning traces (C++ core)";
  m.attr("__version__") = EQR_VERSION;
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  m.def("softmax", [](const std::vector<double>& row) { return softmax(row).probs; }, py::arg("logits"));
  m.def("step_distribution", [](const Matrix& rows) { return step_distribution(to_logits(rows)).probs; },
        py::arg("token_logits"), "Mean of per-token softmax rows of one step.");
  m.def(
      "smooth",
      [](const std::vector<double>& p, double eps, bool renorm) {
        return smooth(StepDistribution{p, false}, smoothing(eps, renorm)).probs;
      },
      py::arg("probs"), py::arg("epsilon") = 1e-7, py::arg("renormalize") = true);
  m.def("entropy", [](const std::vector<double>& p) { return entropy(p); }, py::arg("probs"));
  m.def("kl", [](const std::vector<double>& p, const std::vector<double>& q) { return kl(p, q); });
  m.def("js", [](const std::vector<double>& p, const std::vector<double>& q) { return js(p, q); });
  m.def("hellinger", [](const std::vector<double>& p, const std::vector<double>& q) { return hellinger(p, q); });
  m.def("cosine", [](const std::vector<double>& p, const std::vector<double>& q) { return cosine(p, q); });

  m.def(
      "quantify_chain",
      [](const Matrix& steps, const std::string& algorithm, double eps, bool renorm) {
        ReasoningChain chain;
        for (const auto& p : steps) chain.steps.emplace_back(StepDistribution{p, false});
        chain.meta.step_count = steps.size();
        return rows_to_py(compute(chain, algorithm_from_string(algorithm), smoothing(eps, renorm)));
      },
      py::arg("distributions"), py::arg("algorithm") = "csd", py::arg("epsilon") = 1e-7,
      py::arg("renormalize") = true, "CSD or SFC rows for one chain of step distributions.");

  m.def(
      "gen_chain",
      [](std::uint64_t seed, bool volatile_, bool converge, std::size_t vocab) {
        Matrix out;
        for (const auto& s : gen_chain(profile_for(volatile_, converge, vocab), seed).steps) {
          out.push_back(probs_of(s));
        }
        return out;
      },
      py::arg("seed"), py::arg("volatile") = false, py::arg("converge") = false, py::arg("vocab") = 64);

  m.def(
      "gen_dataset",
      [](const std::string& out_dir, std::size_t n_per_class, std::uint64_t seed, bool converge,
         const std::string& dtype) {
        SynthDatasetSpec spec;
        spec.n_per_class = n_per_class;
        spec.seed = seed;
        spec.dtype = dtype_from_string(dtype);
        auto bad = volatile_profile();
        bad.converge_to_final = converge;
        return gen_dataset(coherent_profile(), bad, spec, out_dir).chains.size();
      },
      py::arg("out_dir"), py::arg("n_per_class") = 50, py::arg("seed") = 0, py::arg("converge") = false,
      py::arg("dtype") = "f64", "Writes traces plus manifest.json; returns the chain count.");

  m.def(
      "load_chain",
      [](const std::string& traces_dir, const std::string& question_id) {
        const std::filesystem::path dir(traces_dir);
        const auto manifest = load_manifest(dir / kManifestFileName);
        for (const auto& e : manifest.chains) {
          if (e.question_id != question_id) continue;
          Matrix out;
          for (const auto& s : load_chain(manifest, e, dir).steps) out.push_back(probs_of(s));
          return out;
        }
        throw Error(ErrorCode::kInvalidArgument, "no chain '" + question_id + "' in manifest");
      },
      py::arg("traces_dir"), py::arg("question_id"), "Step distributions of one stored chain.");

  m.def(
      "quantify",
      [](const std::string& traces_dir, const std::string& algorithm, double eps, unsigned jobs) {
        const std::filesystem::path dir(traces_dir);
        const auto manifest = load_manifest(dir / kManifestFileName);
        std::string text;
        {
          py::gil_scoped_release release;
          const auto r = quantify_dataset(manifest, dir, algorithm_from_string(algorithm), smoothing(eps, true), jobs);
          text = quantified_to_jsonl(r.dataset);
        }
        return text;
      },
      py::arg("traces_dir"), py::arg("algorithm") = "csd", py::arg("epsilon") = 1e-7, py::arg("jobs") = 1,
      "Quantified dataset as JSON lines.");

  m.def(
      "features",
      [](const std::string& jsonl) {
        const auto chains = quantified_from_jsonl(jsonl);
        py::dict out;
        py::list names, rows, labels, ids;
        for (auto n : kFeatureNames) names.append(std::string(n));
        for (const auto& c : chains) {
          const auto f = extract_features(c);
          rows.append(std::vector<double>(f.begin(), f.end()));
          labels.append(c.meta.correct ? 1 : 0);
          ids.append(c.meta.question_id);
        }
        out["names"] = names;
        out["rows"] = rows;
        out["labels"] = labels;
        out["ids"] = ids;
        return out;
      },
      py::arg("jsonl"));

  m.def(
      "_train_evaluate",
      [](const std::string& jsonl, const std::string& family, const std::string& params_json, std::uint64_t seed,
         double test_fraction) {
        const auto chains = quantified_from_jsonl(jsonl);
        const auto data = data_from_quantified(chains);
        ModelConfig cfg;
        cfg.family = model_family_from_string(family);
        cfg.seq.seed = seed;
        for (const auto& [k, v] : nlohmann::json::parse(params_json).items()) apply_param(cfg, k, v);
        nlohmann::json out;
        {
          py::gil_scoped_release release;
          const auto split = stratified_split(data.labels, SplitSpec{test_fraction, seed});
          const auto model = fit_model(cfg, data, split.train);
          out["report"] = report_to_json(evaluate_model(model, data, split.test));
          out["model"] = model_to_json(model, cfg);
        }
        return out.dump();
      },
      py::arg("jsonl"), py::arg("family"), py::arg("params_json"), py::arg("seed"), py::arg("test_fraction"));

  m.def("roc_auc", [](const std::vector<int>& y, const std::vector<double>& s) { return roc_auc(y, s); });
  m.def("f1", [](const std::vector<int>& y, const std::vector<int>& p) { return f1(y, p); });
  m.def("accuracy", [](const std::vector<int>& y, const std::vector<int>& p) { return accuracy(y, p); });
  m.def("balanced_accuracy",
        [](const std::vector<int>& y, const std::vector<int>& p) { return balanced_accuracy(y, p); });
  m.def(
      "stratified_split",
      [](const std::vector<int>& y, double test_fraction, std::uint64_t seed) {
        const auto s = stratified_split(y, SplitSpec{test_fraction, seed});
        return py::make_tuple(s.train, s.test);
      },
      py::arg("labels"), py::arg("test_fraction") = 0.2, py::arg("seed") = 0);
  m.def(
      "infer_thresholds",
      [](const std::vector<std::size_t>& counts) {
        const auto g = infer_thresholds(counts);
        return py::make_tuple(g.low, g.high);
      },
      py::arg("step_counts"));
}
