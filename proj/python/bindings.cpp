#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "emomusic/dataset.hpp"
#include "emomusic/eeg_features.hpp"
#include "emomusic/error.hpp"
#include "emomusic/evaluation.hpp"
#include "emomusic/fusion.hpp"
#include "emomusic/music_features.hpp"
#include "emomusic/pipeline.hpp"
#include "emomusic/svm.hpp"
#include "emomusic/synth.hpp"

namespace py = pybind11;
using namespace emomusic;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
  return {a.data(), a.data() + a.shape(0)};
}

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  Matrix m(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), m.row(0).data());
  return m;
}

template <class Range>
py::array_t<double> to_array(const Range& r) {
  py::array_t<double> out(static_cast<py::ssize_t>(std::size(r)));
  std::copy(std::begin(r), std::end(r), out.mutable_data());
  return out;
}

MultichannelSignal to_eeg(const Array& channels, double rate) {
  const Matrix m = to_matrix(channels);
  if (m.rows() != kEegChannelCount) throw py::value_error("expected 12 channel rows in canonical order");
  MultichannelSignal s;
  s.sample_rate_hz = rate;
  for (std::size_t c = 0; c < m.rows(); ++c) s.channels.emplace_back(m.row(c).begin(), m.row(c).end());
  return s;
}

py::object report_dict(const std::string& json_text) { return py::module_::import("json").attr("loads")(json_text); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "EEG and music emotion recognition core";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("eeg_channels", [] { return std::vector<std::string>(kEegChannels.begin(), kEegChannels.end()); });
  m.def("eeg_feature_names", [] { return std::vector<std::string>(eeg_feature_names().begin(), eeg_feature_names().end()); });
  m.def("music_feature_names",
        [] { return std::vector<std::string>(music_feature_names().begin(), music_feature_names().end()); });

  m.def("higuchi_fd", [](const Array& x, int k_max) { return higuchi_fd(to_vector(x), k_max); }, py::arg("x"),
        py::arg("k_max") = 32);
  m.def("bandpass_filter",
        [](const Array& x, double rate, double low, double high) { return to_array(bandpass_filter(to_vector(x), rate, low, high)); },
        py::arg("x"), py::arg("sample_rate_hz"), py::arg("low_hz"), py::arg("high_hz"));
  m.def(
      "eeg_features",
      [](const Array& channels, double rate, int k_max) {
        EegFeatureConfig cfg;
        cfg.k_max = k_max;
        return to_array(extract_eeg_features(to_eeg(channels, rate), cfg).flatten());
      },
      py::arg("channels"), py::arg("sample_rate_hz") = kDefaultEegRateHz, py::arg("k_max") = 32,
      "17 features (12 Higuchi FD values, 5 asymmetry differences) of a (12, n) window.");
  m.def(
      "music_features",
      [](const Array& samples, double rate) {
        AudioSignal audio{to_vector(samples), rate};
        const auto f = extract_music_features(audio);
        py::dict flags;
        flags["tempo_no_onsets"] = f.tempo_no_onsets;
        flags["attack_no_onsets"] = f.attack_no_onsets;
        flags["flat_chroma"] = f.flat_chroma;
        return py::make_tuple(to_array(f.flatten()), flags);
      },
      py::arg("samples"), py::arg("sample_rate_hz") = kDefaultAudioRateHz,
      "37 music features of a mono window and the degenerate-input flags.");

  py::class_<ProbabilisticSvm>(m, "Svm")
      .def_property_readonly("bias", [](const ProbabilisticSvm& s) { return s.model.bias; })
      .def_property_readonly("support_vector_count", [](const ProbabilisticSvm& s) { return s.model.support_vectors.rows(); })
      .def_property_readonly("converged", [](const ProbabilisticSvm& s) { return s.model.converged; })
      .def_property_readonly("platt", [](const ProbabilisticSvm& s) { return py::make_tuple(s.calibration.a, s.calibration.b); })
      .def("decision_function",
           [](const ProbabilisticSvm& s, const Array& x) {
             const Matrix m = to_matrix(x);
             std::vector<double> out;
             for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(decision_value(s.model, m.row(r)));
             return to_array(out);
           })
      .def("predict_proba",
           [](const ProbabilisticSvm& s, const Array& x) {
             const Matrix m = to_matrix(x);
             std::vector<double> out;
             for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(predict_proba(s.model, s.calibration, m.row(r)));
             return to_array(out);
           })
      .def("to_json", [](const ProbabilisticSvm& s) { return serialize_model(s); })
      .def_static("from_json", [](const std::string& text) { return deserialize_model(text); })
      .def("__eq__", [](const ProbabilisticSvm& a, const ProbabilisticSvm& b) {
        return a.model == b.model && a.calibration.a == b.calibration.a && a.calibration.b == b.calibration.b;
      });

  m.def(
      "train_svm",
      [](const Array& x, const std::vector<int>& y, double c, double kernel_scale, std::uint64_t seed) {
        SvmParams params;
        params.c = c;
        params.kernel_scale = kernel_scale;
        params.seed = seed;
        return train_probabilistic_svm({to_matrix(x), y}, params);
      },
      py::arg("x"), py::arg("y"), py::arg("c") = 1.0, py::arg("kernel_scale") = 3.0, py::arg("seed") = 0,
      "Gaussian-kernel SVM with Platt calibration; labels are +1 / -1.");

  m.def(
      "fuse_decision",
      [](double p_eeg, double p_music, double alpha) {
        return fuse_decision({p_eeg, Modality::Eeg}, {p_music, Modality::Music}, {alpha, 0}).p_class1;
      },
      py::arg("p_eeg"), py::arg("p_music"), py::arg("alpha"));
  m.def(
      "decide", [](double p, std::uint64_t seed, std::int64_t window_id) { return decide({p, Modality::Multimodal, window_id}, seed); },
      py::arg("p"), py::arg("seed") = 0, py::arg("window_id") = 0);

  m.def("mcc", [](long tp, long tn, long fp, long fn) { return mcc({tp, tn, fp, fn}); }, py::arg("tp"), py::arg("tn"),
        py::arg("fp"), py::arg("fn"));
  m.def("accuracy", [](long tp, long tn, long fp, long fn) { return accuracy({tp, tn, fp, fn}); }, py::arg("tp"),
        py::arg("tn"), py::arg("fp"), py::arg("fn"));
  m.def("chance_level", [](const std::vector<int>& labels) { return chance_level(labels); });

  m.def(
      "load_annotations",
      [](const fs::path& path) {
        std::vector<std::tuple<std::int64_t, double, double>> out;
        for (const auto& e : load_annotations(path).events) out.emplace_back(e.t_ms, e.valence, e.arousal);
        return out;
      },
      "List of (t_ms, valence, arousal) events.");
  m.def(
      "manifest_trials",
      [](const fs::path& path) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& s : load_manifest(path).subjects)
          for (const auto& t : s.trials) out.emplace_back(s.subject_id, t.song_id);
        return out;
      },
      "(subject_id, song_id) of every trial in a manifest.");

  m.def(
      "synth",
      [](const fs::path& dir, std::uint64_t seed, std::size_t subjects, std::size_t trials) {
        SynthConfig cfg;
        cfg.seed = seed;
        cfg.subjects = subjects;
        cfg.trials = trials;
        return write_synthetic_dataset(dir, cfg);
      },
      py::arg("out_dir"), py::arg("seed") = 0, py::arg("subjects") = 2, py::arg("trials") = 4,
      "Writes a synthetic dataset and returns its manifest path.");

  m.def(
      "evaluate",
      [](const fs::path& manifest_path, double window_s, const std::string& modality, const std::string& target,
         const std::string& protocol, double alpha, std::uint64_t seed, std::size_t folds, std::size_t repetitions,
         unsigned jobs) {
        ExtractionConfig ecfg;
        ecfg.window_s = window_s;
        CvConfig cfg;
        cfg.window_s = window_s;
        cfg.modality = parse_modality(modality);
        cfg.target = parse_target(target);
        cfg.protocol = parse_protocol(protocol);
        cfg.alpha = alpha;
        cfg.seed = seed;
        cfg.folds = folds;
        cfg.repetitions = repetitions;
        cfg.jobs = jobs;
        std::string text;
        {
          py::gil_scoped_release release;
          const auto dataset = extract_dataset(load_manifest(manifest_path), ecfg, jobs);
          text = report_to_json(run_protocol(dataset, cfg));
        }
        return report_dict(text);
      },
      py::arg("manifest"), py::arg("window_s") = 2.0, py::arg("modality") = "dlf", py::arg("target") = "arousal",
      py::arg("protocol") = "subject-dependent", py::arg("alpha") = 0.5, py::arg("seed") = 0, py::arg("folds") = 10,
      py::arg("repetitions") = 5, py::arg("jobs") = 1,
      "Extracts features from a manifest and cross-validates; returns the report as a dict.");
}
