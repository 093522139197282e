#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "xreg/errors.hpp"
#include "xreg/io.hpp"

namespace xreg::io {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& where) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError(where + ": cannot parse '" + text + "'");
  }
  return value;
}

}  // namespace

void write_report(const MseReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "regressor,regime,mean_mse,std_mse,k_train,k_test,replications\n";
  for (const auto& row : report.rows) {
    out << row.regressor << ',' << to_string(row.regime) << ',' << format_double(row.mean_mse) << ','
        << format_double(row.std_mse) << ',' << row.k_train << ',' << row.k_test << ','
        << row.replications << '\n';
  }
  close_out(out, path);
}

std::vector<MseRow> read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "regressor,regime,mean_mse,std_mse,k_train,k_test,replications") {
    throw DataError(path.string() + ": unexpected report header");
  }
  std::vector<MseRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line);
    const std::string where = path.string() + ": row " + std::to_string(line_no);
    if (fields.size() != 7) throw DataError(where + ": expected 7 fields");
    MseRow row;
    row.regressor = fields[0];
    try {
      row.regime = parse_regime(fields[1]);
    } catch (const std::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    row.mean_mse = parse_number<double>(fields[2], where);
    row.std_mse = parse_number<double>(fields[3], where);
    row.k_train = parse_number<std::size_t>(fields[4], where);
    row.k_test = parse_number<std::size_t>(fields[5], where);
    row.replications = parse_number<std::size_t>(fields[6], where);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_summary(const MseReport& report) {
  std::vector<std::string> labels;
  std::vector<Regime> regimes;
  for (const auto& row : report.rows) {
    if (std::find(labels.begin(), labels.end(), row.regressor) == labels.end()) labels.push_back(row.regressor);
    if (std::find(regimes.begin(), regimes.end(), row.regime) == regimes.end()) regimes.push_back(row.regime);
  }
  std::size_t label_width = 9;
  for (const auto& l : labels) label_width = std::max(label_width, l.size());
  constexpr int kCell = 24;

  std::ostringstream os;
  char buf[64];
  os << std::string(label_width, ' ');
  for (const auto regime : regimes) {
    std::snprintf(buf, sizeof buf, "  %*s", kCell, std::string(to_string(regime)).c_str());
    os << buf;
  }
  os << '\n';
  for (const auto& label : labels) {
    os << label << std::string(label_width - label.size(), ' ');
    double best = std::numeric_limits<double>::infinity();
    for (const auto regime : regimes) {
      if (const auto* row = report.find(label, regime)) best = std::min(best, row->mean_mse);
    }
    for (const auto regime : regimes) {
      const auto* row = report.find(label, regime);
      if (!row) {
        std::snprintf(buf, sizeof buf, "  %*s", kCell, "-");
      } else {
        char cell[48];
        std::snprintf(cell, sizeof cell, "%.4g (%.2g)%s", row->mean_mse, row->std_mse,
                      row->mean_mse == best ? " *" : "  ");
        std::snprintf(buf, sizeof buf, "  %*s", kCell, cell);
      }
      os << buf;
    }
    os << '\n';
  }
  os << "mean MSE (sample std) over replications; * marks the lowest mean per row\n";
  return os.str();
}

void write_report(const std::vector<StabilityCurve>& curves, const std::filesystem::path& path) {
  auto out = open_out(path);
  std::size_t d = 0;
  for (const auto& c : curves) d = std::max(d, c.centroid.size());
  out << "cell_id,k,f_hat";
  for (std::size_t j = 1; j <= d; ++j) out << ",centroid_" << j;
  out << '\n';
  for (const auto& c : curves) {
    std::string centroid;
    for (const double v : c.centroid) centroid += "," + format_double(v);
    for (std::size_t i = 0; i < c.k.size(); ++i) {
      out << c.cell_id << ',' << c.k[i] << ',' << format_double(c.f_hat[i]) << centroid << '\n';
    }
  }
  close_out(out, path);
}

void write_report(const std::vector<IndependenceLevel>& levels, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "t,exceedances,flagged,hill,max_abs_corr\n";
  for (const auto& l : levels) {
    out << format_double(l.t) << ',' << l.exceedances << ',' << (l.flagged ? 1 : 0) << ','
        << format_double(l.hill) << ',' << format_double(l.max_abs_corr) << '\n';
  }
  close_out(out, path);
}

void write_report(const std::vector<DriftLevel>& levels, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "t_low,t_high,n_low,n_high,ks,band,flagged\n";
  for (const auto& l : levels) {
    out << format_double(l.t_low) << ',' << format_double(l.t_high) << ',' << l.n_low << ',' << l.n_high
        << ',' << format_double(l.ks) << ',' << format_double(l.band) << ',' << (l.flagged ? 1 : 0) << '\n';
  }
  close_out(out, path);
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["master_seed"] = manifest.master_seed;
  j["kernel_isa"] = manifest.kernel_isa;
  j["config"] = manifest.config_text;
  auto& reps = j["replications"] = nlohmann::ordered_json::array();
  for (const auto& r : manifest.replications) {
    nlohmann::ordered_json rec;
    rec["index"] = r.index;
    rec["seed"] = r.seed;
    rec["n_train"] = r.n_train;
    rec["n_test"] = r.n_test;
    rec["beta"] = r.beta;
    reps.push_back(std::move(rec));
  }
  auto& hyper = j["hyperparameters"] = nlohmann::ordered_json::object();
  for (const auto& [label, text] : manifest.hyperparameters) hyper[label] = text;
  auto& timings = j["timings_seconds"] = nlohmann::ordered_json::object();
  for (const auto& t : manifest.timings) timings[t.stage] = t.seconds;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  close_out(out, path);
}

}  // namespace xreg::io
