// ivgan/io.hpp

// Copyright 2026  Ivgan Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef IVGAN_IO_HPP_
#define IVGAN_IO_HPP_

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ivgan/common.hpp"
#include "ivgan/eval.hpp"
#include "ivgan/gan.hpp"
#include "ivgan/nn.hpp"
#include "ivgan/plda.hpp"
#include "ivgan/synthcorpus.hpp"

namespace ivgan {

// All binary artifacts share one container:
//   magic "IVGAN1\0\0" | u32 LE header length | UTF-8 JSON header | payload
// The header carries format version, kind, shapes, a config echo, and the
// creation seed; the payload is raw little-endian floats, row-major, in
// header-declared order. Model payloads are f32; the corpus keeps f64 so
// stored vectors stay unit-norm to 1e-9.
constexpr char kContainerMagic[8] = {'I', 'V', 'G', 'A', 'N', '1', '\0', '\0'};
constexpr int kFormatVersion = 1;

class IoError : public DataError {
 public:
  explicit IoError(const std::string& msg) : DataError(msg) {}
};

namespace detail {

template <typename T>
void write_raw(std::ostream& os, const T* data, std::size_t count) {
  os.write(reinterpret_cast<const char*>(data), count * sizeof(T));
}

template <typename T>
void read_raw(std::istream& is, T* data, std::size_t count,
              const std::string& path) {
  is.read(reinterpret_cast<char*>(data), count * sizeof(T));
  std::size_t got = static_cast<std::size_t>(is.gcount());
  if (got != count * sizeof(T))
    throw IoError(path + ": truncated payload, expected " +
                  std::to_string(count) + " values (" +
                  std::to_string(count * sizeof(T)) + " bytes), got " +
                  std::to_string(got) + " bytes");
}

inline void write_container(const std::string& path,
                            const nlohmann::json& header,
                            const std::vector<float>& payload_f32,
                            const std::vector<double>& payload_f64) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(kContainerMagic, sizeof(kContainerMagic));
  std::string h = header.dump();
  std::uint32_t len = static_cast<std::uint32_t>(h.size());
  write_raw(os, &len, 1);
  os.write(h.data(), h.size());
  if (!payload_f32.empty()) write_raw(os, payload_f32.data(), payload_f32.size());
  if (!payload_f64.empty()) write_raw(os, payload_f64.data(), payload_f64.size());
  if (!os) throw IoError("write failed: " + path);
}

struct Container {
  nlohmann::json header;
  std::ifstream stream;
};

inline Container open_container(const std::string& path,
                                const std::string& expected_kind) {
  Container c;
  c.stream.open(path, std::ios::binary);
  if (!c.stream) throw IoError("cannot open: " + path);
  char magic[8];
  c.stream.read(magic, 8);
  if (c.stream.gcount() != 8 ||
      std::memcmp(magic, kContainerMagic, 8) != 0)
    throw IoError(path + ": bad magic, not an ivgan container");
  std::uint32_t len = 0;
  read_raw(c.stream, &len, 1, path);
  std::string h(len, '\0');
  c.stream.read(h.data(), len);
  if (static_cast<std::uint32_t>(c.stream.gcount()) != len)
    throw IoError(path + ": truncated header");
  c.header = nlohmann::json::parse(h, nullptr, false);
  if (c.header.is_discarded())
    throw IoError(path + ": header is not valid JSON");
  if (c.header.value("format_version", -1) != kFormatVersion)
    throw IoError(path + ": unsupported format version");
  std::string kind = c.header.value("kind", "");
  if (kind != expected_kind)
    throw IoError(path + ": kind mismatch, expected '" + expected_kind +
                  "' got '" + kind + "'");
  return c;
}

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Model container

inline void save_mlp(const std::string& path, const Mlp& net,
                     const std::string& role,
                     const nlohmann::json& extra = nlohmann::json::object(),
                     std::uint64_t seed = 0) {
  net.validate();
  nlohmann::json layers = nlohmann::json::array();
  std::vector<float> payload;
  for (const Layer& l : net.layers) {
    layers.push_back({{"in", l.in_dim()},
                      {"out", l.out_dim()},
                      {"activation", activation_name(l.act)},
                      {"alpha", l.alpha}});
    for (int r = 0; r < l.out_dim(); ++r)
      for (int c = 0; c < l.in_dim(); ++c)
        payload.push_back(static_cast<float>(l.w(r, c)));
    for (int r = 0; r < l.out_dim(); ++r)
      payload.push_back(static_cast<float>(l.b(r)));
  }
  nlohmann::json header = {{"format_version", kFormatVersion},
                           {"kind", "mlp"},
                           {"role", role},
                           {"layers", layers},
                           {"seed", seed},
                           {"extra", extra}};
  detail::write_container(path, header, payload, {});
}

inline Mlp load_mlp(const std::string& path, const std::string& expected_role,
                    nlohmann::json* header_out = nullptr) {
  detail::Container c = detail::open_container(path, "mlp");
  std::string role = c.header.value("role", "");
  if (!expected_role.empty() && role != expected_role)
    throw IoError(path + ": role mismatch, expected '" + expected_role +
                  "' got '" + role + "'");
  if (!c.header.contains("layers") || !c.header["layers"].is_array() ||
      c.header["layers"].empty())
    throw IoError(path + ": header missing layer shapes");

  std::size_t expected = 0;
  for (const auto& jl : c.header["layers"]) {
    std::size_t in = jl.at("in").get<std::size_t>();
    std::size_t out = jl.at("out").get<std::size_t>();
    expected += in * out + out;
  }
  std::vector<float> payload(expected);
  detail::read_raw(c.stream, payload.data(), expected, path);
  // A well-formed file ends exactly at the declared parameter count.
  char extra_byte;
  c.stream.read(&extra_byte, 1);
  if (c.stream.gcount() != 0)
    throw IoError(path + ": payload longer than the " +
                  std::to_string(expected) + " declared parameters");

  Mlp net;
  std::size_t pos = 0;
  for (const auto& jl : c.header["layers"]) {
    Layer l;
    int in = jl.at("in").get<int>();
    int out = jl.at("out").get<int>();
    l.act = activation_from_name(jl.at("activation").get<std::string>());
    l.alpha = jl.value("alpha", 0.3);
    l.w.resize(out, in);
    for (int r = 0; r < out; ++r)
      for (int cidx = 0; cidx < in; ++cidx) l.w(r, cidx) = payload[pos++];
    l.b.resize(out);
    for (int r = 0; r < out; ++r) l.b(r) = payload[pos++];
    net.layers.push_back(std::move(l));
  }
  net.validate();
  if (header_out) *header_out = c.header;
  return net;
}

// ---------------------------------------------------------------------------
// Corpus container

inline void save_corpus(const std::string& path, const Corpus& corpus) {
  const CorpusConfig& cc = corpus.config;
  nlohmann::json header = {
      {"format_version", kFormatVersion},
      {"kind", "corpus"},
      {"dtype", "f64"},
      {"config",
       {{"dim", cc.dim},
        {"latent_dim", cc.latent_dim},
        {"num_speakers", cc.num_speakers},
        {"longs_per_speaker", cc.longs_per_speaker},
        {"segments_per_long", cc.segments_per_long},
        {"bias_rank", cc.bias_rank},
        {"short_noise_scale", cc.short_noise_scale},
        {"long_noise_scale", cc.long_noise_scale},
        {"seed", cc.seed}}},
      {"num_longs", corpus.num_longs()},
      {"num_shorts", corpus.num_shorts()}};
  std::vector<double> payload;
  payload.reserve(static_cast<std::size_t>(corpus.num_longs() +
                                           corpus.num_shorts()) *
                  cc.dim);
  for (int r = 0; r < corpus.num_longs(); ++r)
    for (int c = 0; c < cc.dim; ++c) payload.push_back(corpus.longs(r, c));
  for (int r = 0; r < corpus.num_shorts(); ++r)
    for (int c = 0; c < cc.dim; ++c) payload.push_back(corpus.shorts(r, c));
  detail::write_container(path, header, {}, payload);
}

inline Corpus load_corpus(const std::string& path) {
  detail::Container c = detail::open_container(path, "corpus");
  const nlohmann::json& jc = c.header.at("config");
  Corpus corpus;
  CorpusConfig& cc = corpus.config;
  cc.dim = jc.at("dim").get<int>();
  cc.latent_dim = jc.at("latent_dim").get<int>();
  cc.num_speakers = jc.at("num_speakers").get<int>();
  cc.longs_per_speaker = jc.at("longs_per_speaker").get<int>();
  cc.segments_per_long = jc.at("segments_per_long").get<int>();
  cc.bias_rank = jc.at("bias_rank").get<int>();
  cc.short_noise_scale = jc.at("short_noise_scale").get<double>();
  cc.long_noise_scale = jc.at("long_noise_scale").get<double>();
  cc.seed = jc.at("seed").get<std::uint64_t>();
  cc.validate();

  int num_longs = c.header.at("num_longs").get<int>();
  int num_shorts = c.header.at("num_shorts").get<int>();
  int expect_longs = cc.num_speakers * cc.longs_per_speaker;
  if (num_longs != expect_longs ||
      num_shorts != expect_longs * cc.segments_per_long)
    throw IoError(path + ": header counts disagree with config (" +
                  std::to_string(num_longs) + " longs declared, " +
                  std::to_string(expect_longs) + " expected)");

  std::size_t expected =
      static_cast<std::size_t>(num_longs + num_shorts) * cc.dim;
  std::vector<double> payload(expected);
  detail::read_raw(c.stream, payload.data(), expected, path);

  corpus.longs.resize(num_longs, cc.dim);
  corpus.shorts.resize(num_shorts, cc.dim);
  std::size_t pos = 0;
  for (int r = 0; r < num_longs; ++r)
    for (int col = 0; col < cc.dim; ++col) corpus.longs(r, col) = payload[pos++];
  for (int r = 0; r < num_shorts; ++r)
    for (int col = 0; col < cc.dim; ++col)
      corpus.shorts(r, col) = payload[pos++];
  return corpus;
}

// ---------------------------------------------------------------------------
// PLDA container

inline void save_plda(const std::string& path, const PldaModel& m,
                      const nlohmann::json& extra = nlohmann::json::object()) {
  m.validate();
  nlohmann::json header = {{"format_version", kFormatVersion},
                           {"kind", "plda"},
                           {"dim", m.dim()},
                           {"q", m.q()},
                           {"extra", extra}};
  std::vector<float> payload;
  for (int i = 0; i < m.dim(); ++i)
    payload.push_back(static_cast<float>(m.mean(i)));
  for (int r = 0; r < m.dim(); ++r)
    for (int c = 0; c < m.q(); ++c)
      payload.push_back(static_cast<float>(m.speaker_subspace(r, c)));
  for (int r = 0; r < m.dim(); ++r)
    for (int c = 0; c < m.dim(); ++c)
      payload.push_back(static_cast<float>(m.residual_cov(r, c)));
  detail::write_container(path, header, payload, {});
}

inline PldaModel load_plda(const std::string& path) {
  detail::Container c = detail::open_container(path, "plda");
  int dim = c.header.at("dim").get<int>();
  int q = c.header.at("q").get<int>();
  std::size_t expected = static_cast<std::size_t>(dim) +
                         static_cast<std::size_t>(dim) * q +
                         static_cast<std::size_t>(dim) * dim;
  std::vector<float> payload(expected);
  detail::read_raw(c.stream, payload.data(), expected, path);

  PldaModel m;
  m.mean.resize(dim);
  m.speaker_subspace.resize(dim, q);
  m.residual_cov.resize(dim, dim);
  std::size_t pos = 0;
  for (int i = 0; i < dim; ++i) m.mean(i) = payload[pos++];
  for (int r = 0; r < dim; ++r)
    for (int col = 0; col < q; ++col) m.speaker_subspace(r, col) = payload[pos++];
  for (int r = 0; r < dim; ++r)
    for (int col = 0; col < dim; ++col) m.residual_cov(r, col) = payload[pos++];
  // f32 rounding can leave the two triangles a ulp apart; resymmetrize.
  m.residual_cov = 0.5 * (m.residual_cov + m.residual_cov.transpose()).eval();
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// CSV formats. All doubles print as %.17g so parse(emit(x)) == x.

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

inline double parse_double(const std::string& s, const std::string& path) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ": bad numeric field '" + s + "'");
  }
}

}  // namespace detail

inline void write_scores_csv(const std::string& path,
                             const ScoredTrialSet& s) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "# condition=" << s.condition << "\n";
  os << "trial_id,enroll_ref,test_ref,is_target,score\n";
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const TrialScore& t = s.entries[i];
    os << i << ',' << t.enroll_ref << ',' << t.test_ref << ','
       << (t.is_target ? 1 : 0) << ',' << detail::fmt_double(t.score) << "\n";
  }
  if (!os) throw IoError("write failed: " + path);
}

inline ScoredTrialSet read_scores_csv(const std::string& path) {
  ScoredTrialSet s;
  for (const std::string& line : detail::read_lines(path)) {
    if (line.rfind("# condition=", 0) == 0) {
      s.condition = line.substr(std::strlen("# condition="));
      continue;
    }
    if (line[0] == '#' || line.rfind("trial_id,", 0) == 0) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 5) throw IoError(path + ": bad score row: " + line);
    TrialScore t;
    t.enroll_ref = f[1];
    t.test_ref = f[2];
    t.is_target = f[3] == "1";
    t.score = detail::parse_double(f[4], path);
    s.entries.push_back(std::move(t));
  }
  if (s.entries.empty()) throw IoError(path + ": no trials");
  return s;
}

inline void write_trials_csv(const std::string& path, const TrialList& trials,
                             const Corpus& corpus) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "# mode=" << trial_mode_name(trials.mode) << "\n";
  os << "enroll_ref,test_ref,is_target\n";
  for (const Trial& t : trials.entries)
    os << t.enroll.str(corpus) << ',' << t.test.str(corpus) << ','
       << (t.is_target ? 1 : 0) << "\n";
  if (!os) throw IoError("write failed: " + path);
}

inline TrialList read_trials_csv(const std::string& path,
                                 const Corpus& corpus) {
  TrialList trials;
  bool saw_mode = false;
  for (const std::string& line : detail::read_lines(path)) {
    if (line.rfind("# mode=", 0) == 0) {
      trials.mode = trial_mode_from_name(line.substr(std::strlen("# mode=")));
      saw_mode = true;
      continue;
    }
    if (line[0] == '#' || line.rfind("enroll_ref,", 0) == 0) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 3) throw IoError(path + ": bad trial row: " + line);
    trials.entries.push_back({VectorRef::parse(f[0], corpus),
                              VectorRef::parse(f[1], corpus), f[2] == "1"});
  }
  if (!saw_mode) throw IoError(path + ": missing '# mode=' line");
  trials.validate();
  return trials;
}

inline void write_det_csv(const std::string& path,
                          const std::vector<OperatingPoint>& points) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "threshold,p_fa,p_miss\n";
  for (const OperatingPoint& p : points)
    os << detail::fmt_double(p.threshold) << ',' << detail::fmt_double(p.p_fa)
       << ',' << detail::fmt_double(p.p_miss) << "\n";
  if (!os) throw IoError("write failed: " + path);
}

inline std::vector<OperatingPoint> read_det_csv(const std::string& path) {
  std::vector<OperatingPoint> points;
  for (const std::string& line : detail::read_lines(path)) {
    if (line.rfind("threshold,", 0) == 0) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 3) throw IoError(path + ": bad DET row: " + line);
    points.push_back({detail::parse_double(f[0], path),
                      detail::parse_double(f[1], path),
                      detail::parse_double(f[2], path)});
  }
  return points;
}

inline void write_history_csv(const std::string& path,
                              const TrainHistory& history) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "epoch,critic_objective,g_adv_loss,cosine_loss,ce_loss,"
        "combined_loss,heldout_mean_cos\n";
  for (std::size_t e = 0; e < history.epochs.size(); ++e) {
    const EpochRecord& r = history.epochs[e];
    os << e << ',' << detail::fmt_double(r.critic_objective) << ','
       << detail::fmt_double(r.g_adv_loss) << ','
       << detail::fmt_double(r.cosine_loss) << ','
       << detail::fmt_double(r.ce_loss) << ','
       << detail::fmt_double(r.combined_loss) << ','
       << detail::fmt_double(r.heldout_mean_cos) << "\n";
  }
  if (!os) throw IoError("write failed: " + path);
}

inline TrainHistory read_history_csv(const std::string& path) {
  TrainHistory h;
  for (const std::string& line : detail::read_lines(path)) {
    if (line.rfind("epoch,", 0) == 0) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 7) throw IoError(path + ": bad history row: " + line);
    EpochRecord r;
    r.critic_objective = detail::parse_double(f[1], path);
    r.g_adv_loss = detail::parse_double(f[2], path);
    r.cosine_loss = detail::parse_double(f[3], path);
    r.ce_loss = detail::parse_double(f[4], path);
    r.combined_loss = detail::parse_double(f[5], path);
    r.heldout_mean_cos = detail::parse_double(f[6], path);
    h.epochs.push_back(r);
  }
  return h;
}

struct ReportRow {
  std::string condition;
  std::string system;
  double eer = 0.0;
  double min_dcf = 0.0;
  std::string note;
};

inline void write_report_csv(const std::string& path,
                             const std::vector<ReportRow>& rows) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "condition,system,eer,min_dcf,note\n";
  for (const ReportRow& r : rows)
    os << r.condition << ',' << r.system << ',' << detail::fmt_double(r.eer)
       << ',' << detail::fmt_double(r.min_dcf) << ',' << r.note << "\n";
  if (!os) throw IoError("write failed: " + path);
}

inline std::vector<ReportRow> read_report_csv(const std::string& path) {
  std::vector<ReportRow> rows;
  for (const std::string& line : detail::read_lines(path)) {
    if (line.rfind("condition,", 0) == 0) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 5) throw IoError(path + ": bad report row: " + line);
    rows.push_back({f[0], f[1], detail::parse_double(f[2], path),
                    detail::parse_double(f[3], path), f[4]});
  }
  return rows;
}

// Vector CSV for the transform command: header then ref,v0,...,v{d-1} rows.
struct NamedVectors {
  std::vector<std::string> refs;
  Mat rows;
};

inline void write_vectors_csv(const std::string& path,
                              const NamedVectors& v) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "ref";
  for (Eigen::Index c = 0; c < v.rows.cols(); ++c) os << ",v" << c;
  os << "\n";
  for (std::size_t r = 0; r < v.refs.size(); ++r) {
    os << v.refs[r];
    for (Eigen::Index c = 0; c < v.rows.cols(); ++c)
      os << ',' << detail::fmt_double(v.rows(static_cast<Eigen::Index>(r), c));
    os << "\n";
  }
  if (!os) throw IoError("write failed: " + path);
}

inline NamedVectors read_vectors_csv(const std::string& path) {
  NamedVectors out;
  std::vector<std::vector<double>> values;
  for (const std::string& line : detail::read_lines(path)) {
    if (line.rfind("ref,", 0) == 0 || line[0] == '#') continue;
    auto f = detail::split_csv_line(line);
    if (f.size() < 2) throw IoError(path + ": bad vector row: " + line);
    out.refs.push_back(f[0]);
    std::vector<double> row;
    for (std::size_t i = 1; i < f.size(); ++i)
      row.push_back(detail::parse_double(f[i], path));
    if (!values.empty() && values.front().size() != row.size())
      throw IoError(path + ": inconsistent vector widths");
    values.push_back(std::move(row));
  }
  if (values.empty()) throw IoError(path + ": no vectors");
  out.rows.resize(values.size(), values.front().size());
  for (std::size_t r = 0; r < values.size(); ++r)
    for (std::size_t c = 0; c < values[r].size(); ++c)
      out.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          values[r][c];
  return out;
}

}  // namespace ivgan

#endif  // IVGAN_IO_HPP_
