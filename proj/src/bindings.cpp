#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mtsent/corpus.hpp"
#include "mtsent/lexfeat.hpp"
#include "mtsent/metrics.hpp"
#include "mtsent/version.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
  m.doc() = "multitask sentiment toolkit core operations";
  m.attr("__version__") = mtsent::kVersion;

  m.def("tokenize", &mtsent::tokenize, py::arg("text"),
        "Twitter-aware tokenization of one message.");

  m.def("coarsen_label", &mtsent::coarsen_label, py::arg("fine_label"),
        "Map a five-point ordinal label (0..4) onto the three-point scale.");

  m.def("mae_macro", &mtsent::mae_macro, py::arg("truth"), py::arg("pred"), py::arg("k"),
        "Macro-averaged mean absolute error over the k ordinal classes.");

  m.def("micro_f1", &mtsent::micro_f1, py::arg("truth"), py::arg("pred"), py::arg("k"),
        "Micro-averaged F1 over k classes.");

  m.def("macro_f1", &mtsent::macro_f1, py::arg("truth"), py::arg("pred"), py::arg("k"),
        "Macro-averaged F1 over k classes.");

  m.def(
      "evaluate",
      [](const std::vector<int>& truth, const std::vector<int>& pred, int k) {
        const mtsent::EvalReport r = mtsent::evaluate(truth, pred, k);
        py::dict out;
        out["n_examples"] = r.n_examples;
        out["mae_macro"] = r.mae_macro;
        out["micro_f1"] = r.micro_f1;
        out["macro_f1"] = r.macro_f1;
        py::list confusion;
        for (int t = 0; t < k; ++t) {
          py::list row;
          for (int p = 0; p < k; ++p) row.append(r.confusion.at(t, p));
          confusion.append(row);
        }
        out["confusion"] = confusion;
        return out;
      },
      py::arg("truth"), py::arg("pred"), py::arg("k"),
      "Confusion matrix plus the summary metrics, as a dict.");

  m.def(
      "surface_counts",
      [](const std::string& text) {
        const std::vector<std::string> tokens = mtsent::tokenize(text);
        const mtsent::SurfaceCounts counts = mtsent::surface_counts(text, tokens);
        const std::vector<std::string> names = mtsent::SurfaceCounts::names();
        const std::vector<double> values = counts.values();
        py::dict out;
        for (std::size_t i = 0; i < names.size(); ++i) out[names[i].c_str()] = values[i];
        return out;
      },
      py::arg("text"), "Surface-level counts (punctuation, casing, emoticons) of one message.");
}
