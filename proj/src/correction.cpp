#include "rcthresh/correction.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "rcthresh/errors.hpp"

namespace rcthresh {

namespace {

constexpr std::string_view kHeaderTag = "# rcthresh-table v";
constexpr std::string_view kColumnHeader =
    "n,e_thr,p_level,e_est_mean,corr_factor,rel_std,p_all_below,p_all_above,flags";

std::string format_double(double v) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw corrupt_table_error(std::string("table: bad numeric field for ") + what + ": '" +
                              std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view text, const char* what) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw corrupt_table_error(std::string("table: bad integer field for ") + what + ": '" +
                              std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(line.substr(start));
      break;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string_view expect_key(std::string_view field, std::string_view key, int index) {
  // field looks like "key=value"; leading space tolerated.
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  if (field.size() < key.size() + 1 || field.substr(0, key.size()) != key ||
      field[key.size()] != '=') {
    throw corrupt_table_error("table header: expected '" + std::string(key) + "=' in field " +
                              std::to_string(index));
  }
  return field.substr(key.size() + 1);
}

}  // namespace

DistributionSpec table_spec(const TableMeta& meta) {
  if (meta.kind == DistKind::Rayleigh) return unit_mean_rayleigh();
  return unit_mean_rice(meta.k_db);
}

CorrectionLookup lookup_correction(const CorrectionTable& table, int n, double e_est) {
  if (!(e_est > 0)) throw domain_error("lookup_correction: e_est must be > 0");

  const auto first = std::lower_bound(table.rows.begin(), table.rows.end(), n,
                                      [](const CorrectionRow& r, int v) { return r.n < v; });
  const auto last = std::upper_bound(first, table.rows.end(), n,
                                     [](int v, const CorrectionRow& r) { return v < r.n; });

  std::vector<const CorrectionRow*> rows;
  for (auto it = first; it != last; ++it) {
    if (!it->all_excluded) rows.push_back(&*it);
  }
  if (rows.empty()) {
    CorrectionLookup miss;
    miss.n_matched = false;
    return miss;
  }

  CorrectionLookup result;
  result.n_matched = true;
  if (e_est < rows.front()->e_est_mean) {
    throw lookup_range_error(
        "lookup_correction: estimate " + format_double(e_est) +
        " is below the tabulated range (first mean " + format_double(rows.front()->e_est_mean) +
        "); the threshold sits near or below the low grid edge - lower the input power or "
        "extend the table grid");
  }
  if (e_est > rows.back()->e_est_mean) {
    result.e_factor = rows.back()->corr_factor;
    result.rel_std = rows.back()->rel_std;
    result.clamped = true;
    return result;
  }
  const auto upper = std::upper_bound(rows.begin(), rows.end(), e_est,
                                      [](double v, const CorrectionRow* r) { return v < r->e_est_mean; });
  const CorrectionRow* hi = (upper == rows.end()) ? rows.back() : *upper;
  const CorrectionRow* lo = (upper == rows.begin()) ? rows.front() : *(upper - 1);
  if (lo == hi || e_est == lo->e_est_mean) {
    result.e_factor = lo->corr_factor;
    result.rel_std = lo->rel_std;
    return result;
  }
  const double t = (e_est - lo->e_est_mean) / (hi->e_est_mean - lo->e_est_mean);
  result.e_factor = std::lerp(lo->corr_factor, hi->corr_factor, t);
  result.rel_std = std::lerp(lo->rel_std, hi->rel_std, t);
  return result;
}

void validate_table(const CorrectionTable& table) {
  if (table.meta.format_version != 1) {
    throw corrupt_table_error("table: unknown format version " +
                              std::to_string(table.meta.format_version));
  }
  const CorrectionRow* prev = nullptr;
  const CorrectionRow* prev_unflagged = nullptr;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const CorrectionRow& row = table.rows[i];
    const std::string where = "row " + std::to_string(i + 1);
    if (row.n < 2) throw corrupt_table_error("table " + where + ": n must be >= 2");
    if (!(row.p_level >= 0 && row.p_level <= 1)) {
      throw corrupt_table_error("table " + where + ": p_level outside [0, 1]");
    }
    if (prev != nullptr) {
      if (row.n < prev->n) {
        throw corrupt_table_error("table " + where + ": rows not sorted by n");
      }
      if (row.n > prev->n) {
        prev_unflagged = nullptr;
      } else if (!(row.e_thr > prev->e_thr)) {
        throw corrupt_table_error("table " + where + ": e_thr not strictly increasing within n=" +
                                  std::to_string(row.n));
      }
    }
    if (!row.all_excluded) {
      if (!(row.e_est_mean > 0)) {
        throw corrupt_table_error("table " + where + ": e_est_mean must be positive");
      }
      if (prev_unflagged != nullptr && !(row.e_est_mean > prev_unflagged->e_est_mean)) {
        throw corrupt_table_error("table " + where +
                                  ": e_est_mean not strictly increasing within n=" +
                                  std::to_string(row.n) + " (breaks lookup inversion)");
      }
      if (std::abs(row.corr_factor - row.e_thr / row.e_est_mean) > 1e-9) {
        throw corrupt_table_error("table " + where +
                                  ": corr_factor inconsistent with e_thr / e_est_mean");
      }
      prev_unflagged = &row;
    }
    prev = &row;
  }
}

std::string serialize_table(const CorrectionTable& table) {
  std::string out;
  out += kHeaderTag;
  out += std::to_string(table.meta.format_version);
  out += "; kind=";
  out += table.meta.kind == DistKind::Rayleigh ? "rayleigh" : "rice";
  out += "; k_db=";
  out += format_double(table.meta.k_db);
  out += "; method=";
  out += table.meta.method == Method::MonteCarlo ? "mc" : "oracle";
  out += "; trials=" + std::to_string(table.meta.trials);
  out += "; seed=" + std::to_string(table.meta.seed);
  out += "; qlo=" + format_double(table.meta.quantile_lo);
  out += "; qhi=" + format_double(table.meta.quantile_hi);
  out += "; grid=" + std::to_string(table.meta.grid_points);
  out += '\n';
  out += kColumnHeader;
  out += '\n';
  for (const CorrectionRow& row : table.rows) {
    out += std::to_string(row.n);
    out += ',';
    out += format_double(row.e_thr);
    out += ',';
    out += format_double(row.p_level);
    out += ',';
    out += format_double(row.e_est_mean);
    out += ',';
    out += format_double(row.corr_factor);
    out += ',';
    out += format_double(row.rel_std);
    out += ',';
    out += format_double(row.p_all_below);
    out += ',';
    out += format_double(row.p_all_above);
    out += ',';
    if (row.all_excluded) out += "all_excluded";
    out += '\n';
  }
  return out;
}

CorrectionTable parse_table(std::string_view text) {
  CorrectionTable table;

  std::size_t pos = text.find('\n');
  if (pos == std::string_view::npos) throw corrupt_table_error("table: missing header line");
  std::string_view header = text.substr(0, pos);
  text.remove_prefix(pos + 1);

  if (header.substr(0, kHeaderTag.size()) != kHeaderTag) {
    throw corrupt_table_error("table: not a rcthresh table file");
  }
  const auto fields = split(header.substr(kHeaderTag.size()), ';');
  if (fields.size() != 9) throw corrupt_table_error("table header: expected 9 fields");
  table.meta.format_version = static_cast<int>(parse_u64(fields[0], "format version"));
  if (table.meta.format_version != 1) {
    throw corrupt_table_error("table: unknown format version " +
                              std::to_string(table.meta.format_version));
  }
  const auto kind = expect_key(fields[1], "kind", 1);
  if (kind == "rayleigh") {
    table.meta.kind = DistKind::Rayleigh;
  } else if (kind == "rice") {
    table.meta.kind = DistKind::Rice;
  } else {
    throw corrupt_table_error("table header: unknown kind '" + std::string(kind) + "'");
  }
  table.meta.k_db = parse_double(expect_key(fields[2], "k_db", 2), "k_db");
  const auto method = expect_key(fields[3], "method", 3);
  if (method == "mc") {
    table.meta.method = Method::MonteCarlo;
  } else if (method == "oracle") {
    table.meta.method = Method::Oracle;
  } else {
    throw corrupt_table_error("table header: unknown method '" + std::string(method) + "'");
  }
  table.meta.trials = parse_u64(expect_key(fields[4], "trials", 4), "trials");
  table.meta.seed = parse_u64(expect_key(fields[5], "seed", 5), "seed");
  table.meta.quantile_lo = parse_double(expect_key(fields[6], "qlo", 6), "qlo");
  table.meta.quantile_hi = parse_double(expect_key(fields[7], "qhi", 7), "qhi");
  table.meta.grid_points = static_cast<int>(parse_u64(expect_key(fields[8], "grid", 8), "grid"));

  pos = text.find('\n');
  if (pos == std::string_view::npos || text.substr(0, pos) != kColumnHeader) {
    throw corrupt_table_error("table: missing or wrong column header");
  }
  text.remove_prefix(pos + 1);

  std::size_t line_no = 0;
  while (!text.empty()) {
    pos = text.find('\n');
    std::string_view line = pos == std::string_view::npos ? text : text.substr(0, pos);
    text.remove_prefix(pos == std::string_view::npos ? text.size() : pos + 1);
    if (line.empty()) continue;
    ++line_no;
    const auto cols = split(line, ',');
    if (cols.size() != 9) {
      throw corrupt_table_error("table row " + std::to_string(line_no) + ": expected 9 columns, got " +
                                std::to_string(cols.size()));
    }
    CorrectionRow row;
    row.n = static_cast<int>(parse_u64(cols[0], "n"));
    row.e_thr = parse_double(cols[1], "e_thr");
    row.p_level = parse_double(cols[2], "p_level");
    row.e_est_mean = parse_double(cols[3], "e_est_mean");
    row.corr_factor = parse_double(cols[4], "corr_factor");
    row.rel_std = parse_double(cols[5], "rel_std");
    row.p_all_below = parse_double(cols[6], "p_all_below");
    row.p_all_above = parse_double(cols[7], "p_all_above");
    if (cols[8] == "all_excluded") {
      row.all_excluded = true;
    } else if (!cols[8].empty()) {
      throw corrupt_table_error("table row " + std::to_string(line_no) + ": unknown flag '" +
                                std::string(cols[8]) + "'");
    }
    table.rows.push_back(row);
  }

  validate_table(table);
  return table;
}

void save_table(const CorrectionTable& table, const std::filesystem::path& path) {
  const std::string payload = serialize_table(table);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("save_table: cannot open '" + tmp.string() + "' for writing");
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw io_error("save_table: write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw io_error("save_table: cannot move table into place at '" + path.string() + "'");
  }
}

CorrectionTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("load_table: cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw io_error("load_table: read failed for '" + path.string() + "'");
  return parse_table(buffer.str());
}

}  // namespace rcthresh
