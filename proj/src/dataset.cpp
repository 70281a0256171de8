#include "emomusic/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "emomusic/error.hpp"
#include "emomusic/text_io.hpp"

namespace emomusic {

using nlohmann::json;

std::size_t DatasetManifest::trial_count() const {
  std::size_t n = 0;
  for (const auto& s : subjects) n += s.trials.size();
  return n;
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

template <class T>
T required(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw Error(ErrorKind::InvalidManifest, where + ": missing '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidManifest, where + ": field '" + key + "': " + e.what());
  }
}

}  // namespace

DatasetManifest load_manifest(const fs::path& path) {
  const std::string text = text::read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("subjects") || !doc["subjects"].is_array())
    throw Error(ErrorKind::InvalidManifest, path.string() + ": expected {\"subjects\": [...]}");

  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  DatasetManifest manifest;
  std::set<std::string> subject_ids;
  for (const auto& s : doc["subjects"]) {
    SubjectRecord rec;
    rec.subject_id = required<std::string>(s, "subject_id", "subject");
    if (!subject_ids.insert(rec.subject_id).second)
      throw Error(ErrorKind::InvalidManifest, "duplicate subject_id " + rec.subject_id);
    if (!s.contains("trials") || !s["trials"].is_array())
      throw Error(ErrorKind::InvalidManifest, rec.subject_id + ": missing trials array");

    std::set<std::string> songs;
    for (const auto& t : s["trials"]) {
      const std::string where = rec.subject_id + " trial";
      TrialRef ref;
      ref.song_id = required<std::string>(t, "song_id", where);
      if (!songs.insert(ref.song_id).second)
        throw Error(ErrorKind::DuplicateTrial, rec.subject_id + "/" + ref.song_id);
      ref.eeg_path = resolve(base, required<std::string>(t, "eeg", where));
      ref.audio_path = resolve(base, required<std::string>(t, "audio", where));
      ref.annotation_path = resolve(base, required<std::string>(t, "annotation", where));
      ref.familiarity = t.value("familiarity", 0);
      ref.confidence = required<int>(t, "confidence", where);
      if (ref.confidence < 1 || ref.confidence > 3)
        throw Error(ErrorKind::InvalidManifest,
                    rec.subject_id + "/" + ref.song_id + ": confidence must be 1..3");
      for (const auto* p : {&ref.eeg_path, &ref.audio_path, &ref.annotation_path})
        if (!fs::exists(*p)) throw Error(ErrorKind::MissingFile, p->string());
      rec.trials.push_back(std::move(ref));
    }
    manifest.subjects.push_back(std::move(rec));
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  auto rel = [&](const fs::path& p) {
    auto r = p.lexically_relative(base);
    return (r.empty() ? p : r).generic_string();
  };
  json doc;
  doc["subjects"] = json::array();
  for (const auto& s : manifest.subjects) {
    json js;
    js["subject_id"] = s.subject_id;
    js["trials"] = json::array();
    for (const auto& t : s.trials) {
      js["trials"].push_back({{"song_id", t.song_id},
                              {"eeg", rel(t.eeg_path)},
                              {"audio", rel(t.audio_path)},
                              {"annotation", rel(t.annotation_path)},
                              {"familiarity", t.familiarity},
                              {"confidence", t.confidence}});
    }
    doc["subjects"].push_back(std::move(js));
  }
  text::write_file(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// EEG

MultichannelSignal MultichannelSignal::slice(std::size_t first, std::size_t count) const {
  MultichannelSignal out;
  out.sample_rate_hz = sample_rate_hz;
  out.channels.reserve(channels.size());
  for (const auto& ch : channels)
    out.channels.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(first),
                              ch.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

fs::path eeg_sidecar_path(const fs::path& eeg_path) {
  auto p = eeg_path;
  p.replace_extension(".json");
  return p;
}

MultichannelSignal load_eeg(const fs::path& path) {
  const std::string text = text::read_file(path);
  const auto rows = text::lines(text);
  if (rows.empty()) throw Error(ErrorKind::ParseError, path.string() + ": empty file");

  const char delim = rows.front().find('\t') != std::string_view::npos ? '\t' : ',';
  const auto header = text::split(rows.front(), delim);
  if (header.size() != kEegChannelCount)
    throw Error(ErrorKind::ChannelCountMismatch,
                path.string() + ": expected 12 channels, found " + std::to_string(header.size()));

  // column_of[c] = file column holding canonical channel c
  std::array<std::size_t, kEegChannelCount> column_of{};
  std::array<bool, kEegChannelCount> seen{};
  for (std::size_t col = 0; col < header.size(); ++col) {
    auto it = std::find(kEegChannels.begin(), kEegChannels.end(), header[col]);
    if (it == kEegChannels.end())
      throw Error(ErrorKind::UnknownChannel, path.string() + ": '" + std::string(header[col]) + "'");
    const auto c = static_cast<std::size_t>(it - kEegChannels.begin());
    if (seen[c]) throw Error(ErrorKind::UnknownChannel, path.string() + ": duplicate '" + std::string(header[col]) + "'");
    seen[c] = true;
    column_of[c] = col;
  }

  MultichannelSignal signal;
  signal.channels.assign(kEegChannelCount, {});
  for (auto& ch : signal.channels) ch.reserve(rows.size());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (text::trim(rows[r]).empty()) continue;
    const auto fields = text::split(rows[r], delim);
    if (fields.size() != kEegChannelCount)
      throw Error(ErrorKind::ChannelCountMismatch,
                  path.string() + ": row " + std::to_string(r + 1) + " has " + std::to_string(fields.size()) + " fields");
    for (std::size_t c = 0; c < kEegChannelCount; ++c) {
      auto v = text::parse_double(fields[column_of[c]]);
      if (!v || !std::isfinite(*v))
        throw Error(ErrorKind::NonNumericSample,
                    path.string() + ": row " + std::to_string(r + 1) + " value '" + std::string(fields[column_of[c]]) + "'");
      signal.channels[c].push_back(*v);
    }
  }

  const auto sidecar = eeg_sidecar_path(path);
  if (fs::exists(sidecar)) {
    try {
      const auto meta = json::parse(text::read_file(sidecar));
      signal.sample_rate_hz = meta.at("sample_rate_hz").get<double>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ParseError, sidecar.string() + ": " + e.what());
    }
    if (!(signal.sample_rate_hz > 0)) throw Error(ErrorKind::ParseError, sidecar.string() + ": sample_rate_hz must be positive");
  }
  return signal;
}

void save_eeg(const MultichannelSignal& signal, const fs::path& path) {
  std::string out;
  for (std::size_t c = 0; c < kEegChannelCount; ++c) {
    if (c) out += ',';
    out += kEegChannels[c];
  }
  out += '\n';
  for (std::size_t i = 0; i < signal.sample_count(); ++i) {
    for (std::size_t c = 0; c < kEegChannelCount; ++c) {
      if (c) out += ',';
      out += text::format_double(signal.channels[c][i]);
    }
    out += '\n';
  }
  text::write_file(path, out);
  text::write_file(eeg_sidecar_path(path),
                   json{{"sample_rate_hz", signal.sample_rate_hz}}.dump() + "\n");
}

AudioSignal AudioSignal::slice(std::size_t first, std::size_t count) const {
  AudioSignal out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(first),
                     samples.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

// ---------------------------------------------------------------------------
// Annotations

AnnotationStream parse_annotations(std::string_view contents) {
  const auto rows = text::lines(contents);
  std::size_t r = 0;
  while (r < rows.size() && text::trim(rows[r]).empty()) ++r;
  if (r == rows.size() || text::trim(rows[r]) != "t_ms,valence,arousal")
    throw Error(ErrorKind::ParseError, "annotation header must be 't_ms,valence,arousal'");

  AnnotationStream stream;
  for (++r; r < rows.size(); ++r) {
    if (text::trim(rows[r]).empty()) continue;
    const auto f = text::split(rows[r], ',');
    const auto line = std::to_string(r + 1);
    if (f.size() != 3) throw Error(ErrorKind::ParseError, "line " + line + ": expected 3 fields");
    const auto t = text::parse_int(f[0]);
    const auto v = text::parse_double(f[1]);
    const auto a = text::parse_double(f[2]);
    if (!t || !v || !a) throw Error(ErrorKind::ParseError, "line " + line + ": malformed numbers");
    if (*t < 0) throw Error(ErrorKind::InvalidAnnotation, "line " + line + ": negative t_ms");
    if (!(std::abs(*v) <= 1.0) || !(std::abs(*a) <= 1.0))
      throw Error(ErrorKind::InvalidAnnotation, "line " + line + ": value outside [-1, 1]");
    if (!stream.events.empty() && *t <= stream.events.back().t_ms)
      throw Error(ErrorKind::InvalidAnnotation, "line " + line + ": t_ms not strictly increasing");
    stream.events.push_back({*t, *v, *a});
  }
  return stream;
}

AnnotationStream load_annotations(const fs::path& path) {
  try {
    return parse_annotations(text::read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MissingFile) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string format_annotations(const AnnotationStream& stream) {
  std::string out = "t_ms,valence,arousal\n";
  for (const auto& e : stream.events) {
    out += std::to_string(e.t_ms);
    out += ',';
    out += text::format_double(e.valence);
    out += ',';
    out += text::format_double(e.arousal);
    out += '\n';
  }
  return out;
}

void save_annotations(const AnnotationStream& stream, const fs::path& path) {
  text::write_file(path, format_annotations(stream));
}

namespace {

const AnnotationEvent& held_event(const AnnotationStream& stream, double t_ms) {
  if (stream.events.empty()) throw Error(ErrorKind::EmptyStream, "annotation stream has no events");
  auto it = std::upper_bound(stream.events.begin(), stream.events.end(), t_ms,
                             [](double t, const AnnotationEvent& e) { return t < static_cast<double>(e.t_ms); });
  return it == stream.events.begin() ? stream.events.front() : *std::prev(it);
}

}  // namespace

AffectPoint resample_annotations(const AnnotationStream& stream, double t_s) {
  // Tolerance absorbs rounding in t_s so a time on an event lands on that event.
  const auto& e = held_event(stream, t_s * 1000.0 + 1e-6);
  return {e.valence, e.arousal};
}

// ---------------------------------------------------------------------------
// Trials and windows

double Trial::duration_s() const { return std::min(eeg.duration_s(), audio.duration_s()); }

Trial load_trial(const std::string& subject_id, const TrialRef& ref) {
  Trial trial;
  trial.subject_id = subject_id;
  trial.ref = ref;
  trial.eeg = load_eeg(ref.eeg_path);
  trial.audio = load_wav(ref.audio_path);
  trial.annotations = load_annotations(ref.annotation_path);
  return trial;
}

std::vector<AnalysisWindow> segment_windows(double duration_s, double window_s, double hop_s) {
  if (!(window_s > 0)) throw Error(ErrorKind::InvalidArgument, "window_s must be positive");
  if (hop_s <= 0) hop_s = window_s;
  if (window_s > duration_s + 1e-9)
    throw Error(ErrorKind::WindowLongerThanTrial,
                "window " + text::format_double(window_s) + " s exceeds trial of " + text::format_double(duration_s) + " s");
  const auto count = static_cast<std::size_t>(std::floor((duration_s - window_s) / hop_s + 1e-9)) + 1;
  std::vector<AnalysisWindow> windows;
  windows.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    windows.push_back({static_cast<double>(i) * hop_s, window_s});
  return windows;
}

std::vector<AnalysisWindow> segment_windows(const Trial& trial, double window_s, double hop_s) {
  return segment_windows(trial.duration_s(), window_s, hop_s);
}

std::pair<std::size_t, std::size_t> window_sample_range(const AnalysisWindow& window, double rate_hz) {
  const auto first = static_cast<std::size_t>(std::llround(window.start_s * rate_hz));
  const auto count = static_cast<std::size_t>(std::llround(window.length_s * rate_hz));
  return {first, count};
}

WindowLabel label_window(const AnnotationStream& stream, const AnalysisWindow& window) {
  if (stream.events.empty()) throw Error(ErrorKind::EmptyStream, "annotation stream has no events");
  // Integer milliseconds keep the sampling grid exact.
  const auto step_ms = static_cast<std::int64_t>(1000.0 / kLabelRateHz);
  const auto start_ms = std::llround(window.start_s * 1000.0);
  const auto n = std::max<std::int64_t>(1, std::llround(window.length_s * kLabelRateHz));
  double sum_v = 0.0, sum_a = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    const auto& e = held_event(stream, static_cast<double>(start_ms + j * step_ms));
    sum_v += e.valence;
    sum_a += e.arousal;
  }
  WindowLabel label;
  label.mean_valence = sum_v / static_cast<double>(n);
  label.mean_arousal = sum_a / static_cast<double>(n);
  label.valence = label.mean_valence >= 0.0 ? ValenceClass::Positive : ValenceClass::Negative;
  label.arousal = label.mean_arousal >= 0.0 ? ArousalClass::High : ArousalClass::Low;
  return label;
}

}  // namespace emomusic
