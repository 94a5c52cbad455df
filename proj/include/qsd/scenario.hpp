/* Scenario driven verification: parse a scenario description, run the
   requested residual suites over one geometry, and emit a structured
   report.  The canonical report never contains wall clock data, so warm
   and cold cache runs are byte identical.  The cache stores the
   hypergeometric theories keyed by (space, bundle, twist, truncation)
   together with a content checksum; a damaged entry surfaces as
   CacheCorrupt and the caller recomputes.

   Suite names: narrow (linear algebra of the narrow subspace), flatness
   (all six module flavors, curvature and pairing residuals), cone (the
   compact transport against the Euler transport at the dual parameter),
   compact (restriction to Z, symplectic forms, equivariant
   intertwining), narrowqsd (the narrow square and pairing preservation),
   gamma (reflection, factorization, dressed squares, base pairings),
   invariants (local genus zero numbers).  Scope errors (NonConvex,
   MirrorMapOutOfRange, AmbientDegenerate) mark a suite as out of scope
   instead of failing the run. */
#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qsd/serre.hpp"

namespace qsd {

using Json = nlohmann::ordered_json;

// ---- scenarios --------------------------------------------------------------

inline constexpr int kMaxTruncation = 6;

struct Scenario {
  std::string space;                // "P1" .. "P4"
  std::vector<int> bundle;          // splitting degrees of E
  int truncation = 3;               // working q order
  std::vector<std::string> suites;  // expanded, in canonical order
  bool cache = false;
};

inline const std::vector<std::string>& all_suites() {
  static const std::vector<std::string> names = {
      "narrow",    "flatness", "cone",      "compact",
      "narrowqsd", "gamma",    "invariants"};
  return names;
}

inline int space_dimension(const std::string& name) {
  bool ok = name.size() >= 2 && name[0] == 'P';
  for (std::size_t i = 1; ok && i < name.size(); ++i)
    ok = std::isdigit(static_cast<unsigned char>(name[i])) != 0;
  if (!ok) throw ParseError("space must be P1..P4, got '" + name + "'");
  int n = std::stoi(name.substr(1));
  if (n < 1 || n > 4) throw ParseError("space out of range: " + name);
  return n;
}

inline Scenario parse_scenario(const Json& j) {
  if (!j.is_object()) throw ParseError("scenario must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key != "space" && key != "bundle" && key != "truncation" &&
        key != "suites" && key != "cache")
      throw ParseError("unknown scenario field '" + key + "'");
  }
  Scenario s;
  if (!j.contains("space") || !j["space"].is_string())
    throw ParseError("scenario needs a string 'space'");
  s.space = j["space"].get<std::string>();
  space_dimension(s.space);
  if (!j.contains("bundle") || !j["bundle"].is_array())
    throw ParseError("scenario needs an integer array 'bundle'");
  for (const auto& v : j["bundle"]) {
    if (!v.is_number_integer())
      throw ParseError("bundle degrees must be integers");
    s.bundle.push_back(v.get<int>());
  }
  if (j.contains("truncation")) {
    if (!j["truncation"].is_number_integer())
      throw ParseError("truncation must be an integer");
    s.truncation = j["truncation"].get<int>();
  }
  if (s.truncation < 1 || s.truncation > kMaxTruncation)
    throw ParseError("truncation must lie in 1.." +
                     std::to_string(kMaxTruncation));
  std::vector<std::string> want;
  if (j.contains("suites")) {
    if (!j["suites"].is_array())
      throw ParseError("suites must be an array of names");
    for (const auto& v : j["suites"]) {
      if (!v.is_string()) throw ParseError("suites must be an array of names");
      want.push_back(v.get<std::string>());
    }
  }
  if (want.empty()) want.push_back("all");
  bool all = false;
  for (const std::string& w : want) {
    if (w == "all") {
      all = true;
      continue;
    }
    const auto& names = all_suites();
    if (std::find(names.begin(), names.end(), w) == names.end())
      throw ParseError("unknown suite '" + w + "'");
  }
  for (const std::string& name : all_suites())
    if (all || std::find(want.begin(), want.end(), name) != want.end())
      s.suites.push_back(name);
  if (j.contains("cache")) {
    if (!j["cache"].is_boolean()) throw ParseError("cache must be a boolean");
    s.cache = j["cache"].get<bool>();
  }
  return s;
}

inline Json scenario_to_json(const Scenario& s) {
  Json out;
  out["space"] = s.space;
  out["bundle"] = s.bundle;
  out["truncation"] = s.truncation;
  out["suites"] = s.suites;
  out["cache"] = s.cache;
  return out;
}

// ---- series serialization ---------------------------------------------------
// A scalar series is an array of layers q^0 .. q^D; each layer is an array
// of terms [z, lam, lz, "scalar"] with the scalar in canonical text form.
// Class valued series carry coordinate arrays instead of a single scalar.

inline Json series_to_json(const ScalarSeries& s) {
  Json layers = Json::array();
  for (int d = 0; d <= s.order; ++d) {
    Json terms = Json::array();
    for (const auto& [k, v] : s.layer[static_cast<std::size_t>(d)])
      terms.push_back(Json::array({k.z, k.lam, k.lz, v.to_text()}));
    layers.push_back(std::move(terms));
  }
  return layers;
}

inline ScalarSeries series_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw ParseError("series: expected a nonempty layer array");
  ScalarSeries s = ScalarSeries::make(static_cast<int>(j.size()) - 1);
  for (int d = 0; d < static_cast<int>(j.size()); ++d)
    for (const Json& t : j[static_cast<std::size_t>(d)]) {
      if (!t.is_array() || t.size() != 4)
        throw ParseError("series: malformed term");
      ZKey k{t[0].get<int>(), t[1].get<int>(), t[2].get<int>()};
      s.add_term(d, k, Scalar::parse(t[3].get<std::string>()));
    }
  return s;
}

inline Json class_series_to_json(const ClassSeries& s) {
  Json layers = Json::array();
  for (int d = 0; d <= s.order; ++d) {
    Json terms = Json::array();
    for (const auto& [k, v] : s.layer[static_cast<std::size_t>(d)]) {
      Json coords = Json::array();
      for (const Scalar& c : v.c) coords.push_back(c.to_text());
      terms.push_back(Json::array({k.z, k.lam, k.lz, std::move(coords)}));
    }
    layers.push_back(std::move(terms));
  }
  return layers;
}

inline ClassSeries class_series_from_json(const Json& j, std::size_t len) {
  if (!j.is_array() || j.empty())
    throw ParseError("class series: expected a nonempty layer array");
  ClassSeries s = ClassSeries::make(static_cast<int>(j.size()) - 1);
  for (int d = 0; d < static_cast<int>(j.size()); ++d)
    for (const Json& t : j[static_cast<std::size_t>(d)]) {
      if (!t.is_array() || t.size() != 4 || !t[3].is_array() ||
          t[3].size() != len)
        throw ParseError("class series: malformed term");
      ZKey k{t[0].get<int>(), t[1].get<int>(), t[2].get<int>()};
      CohClass v = CohClass::zero(len);
      for (std::size_t i = 0; i < len; ++i)
        v.c[i] = Scalar::parse(t[3][i].get<std::string>());
      s.add_term(d, k, v);
    }
  return s;
}

inline Json matrix_to_json(const SeriesMatrix& m) {
  Json out;
  out["n"] = m.n;
  Json entries = Json::array();
  for (const ScalarSeries& s : m.e) entries.push_back(series_to_json(s));
  out["e"] = std::move(entries);
  return out;
}

inline SeriesMatrix matrix_from_json(const Json& j) {
  std::size_t n = j.at("n").get<std::size_t>();
  const Json& entries = j.at("e");
  if (!entries.is_array() || entries.size() != n * n)
    throw ParseError("matrix: entry count disagrees with the size");
  SeriesMatrix m;
  m.n = n;
  for (const Json& e : entries) m.e.push_back(series_from_json(e));
  m.order = m.e.empty() ? 0 : m.e.front().order;
  return m;
}

// ---- theory cache -----------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

class SeriesCache {
 public:
  explicit SeriesCache(std::string dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  static std::string key_string(const GeometryTriple& g, Twist tw, int order) {
    std::string k = "space=P" + std::to_string(g.dim_x()) + ";bundle=";
    const auto& degrees = g.bundle().degrees;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
      if (i) k += ',';
      k += std::to_string(degrees[i]);
    }
    k += ";twist=" + twist_name(tw) + ";truncation=" + std::to_string(order);
    return k;
  }

  std::filesystem::path entry_path(const GeometryTriple& g, Twist tw,
                                   int order) const {
    return dir_ / ("qsd-" + hex64(fnv1a64(key_string(g, tw, order))) + ".json");
  }

  // absent entry -> nullopt; damaged entry -> CacheCorrupt
  std::optional<Theory> get(const GeometryTriple& g, Twist tw,
                            int order) const {
    std::filesystem::path p = entry_path(g, tw, order);
    std::ifstream in(p);
    if (!in) return std::nullopt;
    Json doc;
    try {
      in >> doc;
    } catch (const std::exception& e) {
      throw CacheCorrupt("unreadable entry " + p.string() + ": " + e.what());
    }
    try {
      const Json& key = doc.at("key");
      if (key.at("k").get<std::string>() != key_string(g, tw, order))
        throw CacheCorrupt("key mismatch in " + p.string());
      const Json& payload = doc.at("payload");
      if (doc.at("checksum").get<std::string>() !=
          hex64(fnv1a64(payload.dump())))
        throw CacheCorrupt("checksum mismatch in " + p.string());
      std::size_t len = g.len();
      Theory th{g,
                tw,
                order,
                class_series_from_json(payload.at("i_raw"), len),
                class_series_from_json(payload.at("i_norm"), len),
                series_from_json(payload.at("i0")),
                series_from_json(payload.at("tau0")),
                series_from_json(payload.at("tau2")),
                matrix_from_json(payload.at("solution")),
                matrix_from_json(payload.at("s_factor")),
                matrix_from_json(payload.at("bmat")),
                matrix_from_json(payload.at("a_mon"))};
      bool shapes = th.i_raw.order == order && th.i_norm.order == order &&
                    th.i0.order == order && th.tau0.order == order &&
                    th.tau2.order == order && th.solution.order == order &&
                    th.solution.n == len && th.s_factor.n == len &&
                    th.bmat.n == len && th.a_mon.n == len;
      if (!shapes) throw CacheCorrupt("shape mismatch in " + p.string());
      return th;
    } catch (const CacheCorrupt&) {
      throw;
    } catch (const std::exception& e) {
      throw CacheCorrupt("bad entry " + p.string() + ": " + e.what());
    }
  }

  // writes are serialized through a single mutex; readers never lock
  void put(const Theory& th) const {
    Json payload;
    payload["i_raw"] = class_series_to_json(th.i_raw);
    payload["i_norm"] = class_series_to_json(th.i_norm);
    payload["i0"] = series_to_json(th.i0);
    payload["tau0"] = series_to_json(th.tau0);
    payload["tau2"] = series_to_json(th.tau2);
    payload["solution"] = matrix_to_json(th.solution);
    payload["s_factor"] = matrix_to_json(th.s_factor);
    payload["bmat"] = matrix_to_json(th.bmat);
    payload["a_mon"] = matrix_to_json(th.a_mon);
    Json doc;
    doc["key"] =
        Json{{"k", key_string(th.geom, th.twist, th.order)}};
    doc["checksum"] = hex64(fnv1a64(payload.dump()));
    doc["payload"] = std::move(payload);

    static std::mutex write_mu;
    std::lock_guard<std::mutex> lock(write_mu);
    std::filesystem::path p = entry_path(th.geom, th.twist, th.order);
    std::filesystem::path tmp = p;
    tmp += ".tmp";
    {
      std::ofstream out(tmp);
      out << doc.dump(1) << '\n';
    }
    std::filesystem::rename(tmp, p);
  }

  Theory get_or_build(const GeometryTriple& g, Twist tw, int order) const {
    try {
      if (std::optional<Theory> hit = get(g, tw, order)) return *std::move(hit);
    } catch (const CacheCorrupt&) {
      // fall through and rebuild below
    }
    Theory th = build_theory(g, tw, order);
    put(th);
    return th;
  }

 private:
  std::filesystem::path dir_;
};

// ---- failure payloads --------------------------------------------------------
// Every entry pinpoints a (q, z, lam, lz, slot) location with the rendered
// coefficient, enough to reproduce the offending number in isolation.

inline void collect_series(std::vector<std::string>& out,
                           const std::string& label, const ScalarSeries& s) {
  for (int d = 0; d <= s.order; ++d)
    for (const auto& [k, v] : s.layer[static_cast<std::size_t>(d)])
      out.push_back(label + " q^" + std::to_string(d) + " z^" +
                    std::to_string(k.z) + " lam^" + std::to_string(k.lam) +
                    " lz^" + std::to_string(k.lz) + " = " + v.to_text());
}

inline void collect_vector(std::vector<std::string>& out,
                           const std::string& label,
                           const std::vector<ScalarSeries>& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    collect_series(out, label + "[" + std::to_string(i) + "]", v[i]);
}

inline void collect_matrix(std::vector<std::string>& out,
                           const std::string& label, const SeriesMatrix& m) {
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j)
      if (!m.at(i, j).is_zero())
        collect_series(out,
                       label + "[" + std::to_string(i) + "," +
                           std::to_string(j) + "]",
                       m.at(i, j));
}

// ---- reports ------------------------------------------------------------------

struct SuiteResult {
  std::string name;
  std::string status = "pass";  // pass | fail | scope
  std::vector<std::string> failures;
  std::vector<std::string> scopes;
  Json derived;  // suite specific payload, null when absent
};

struct Report {
  Scenario scenario;
  std::vector<SuiteResult> suites;
  double seconds = 0.0;
};

inline Json report_to_json(const Report& rep, bool include_timing = false) {
  Json out;
  out["scenario"] = scenario_to_json(rep.scenario);
  Json suites = Json::array();
  for (const SuiteResult& sr : rep.suites) {
    Json js;
    js["name"] = sr.name;
    js["status"] = sr.status;
    js["failures"] = sr.failures;
    js["scopes"] = sr.scopes;
    js["derived"] = sr.derived;
    suites.push_back(std::move(js));
  }
  out["suites"] = std::move(suites);
  if (include_timing) out["seconds"] = rep.seconds;
  return out;
}

inline std::string report_to_text(const Report& rep,
                                  bool include_timing = false) {
  std::ostringstream os;
  os << rep.scenario.space << " bundle=[";
  for (std::size_t i = 0; i < rep.scenario.bundle.size(); ++i) {
    if (i) os << ',';
    os << rep.scenario.bundle[i];
  }
  os << "] D=" << rep.scenario.truncation << '\n';
  for (const SuiteResult& sr : rep.suites) {
    os << "  " << sr.name << ": " << sr.status << '\n';
    for (const std::string& f : sr.failures) os << "    " << f << '\n';
    for (const std::string& sc : sr.scopes) os << "    " << sc << '\n';
    if (!sr.derived.is_null()) os << "    derived: " << sr.derived.dump()
                                  << '\n';
  }
  if (include_timing) os << "  seconds: " << rep.seconds << '\n';
  return os.str();
}

// 0 when every suite passed, 1 on any failure, 2 when the only deviations
// are scope skips
inline int report_exit_code(const Report& rep) {
  bool fail = false, scope = false;
  for (const SuiteResult& sr : rep.suites) {
    fail = fail || sr.status == "fail";
    scope = scope || sr.status == "scope";
  }
  return fail ? 1 : (scope ? 2 : 0);
}

// ---- the runner -----------------------------------------------------------------

inline Report run_scenario(const Scenario& s,
                           const std::string& cache_dir = std::string()) {
  auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.scenario = s;

  std::optional<SeriesCache> cache;
  if (s.cache)
    cache.emplace(cache_dir.empty() ? std::string(".qsd-cache") : cache_dir);

  std::optional<GeometryTriple> geom;
  std::exception_ptr geom_err;
  try {
    geom.emplace(SpaceModel{space_dimension(s.space)}, BundleModel{s.bundle});
  } catch (const QsdError&) {
    geom_err = std::current_exception();
  }
  auto geometry = [&]() -> const GeometryTriple& {
    if (!geom) std::rethrow_exception(geom_err);
    return *geom;
  };

  auto theory = [&](Twist tw) -> Theory {
    const GeometryTriple& g = geometry();
    if (cache) return cache->get_or_build(g, tw, s.truncation);
    return build_theory(g, tw, s.truncation);
  };

  std::optional<SerreContext> ctx;
  std::exception_ptr ctx_err;
  auto context = [&]() -> const SerreContext& {
    if (ctx) return *ctx;
    if (ctx_err) std::rethrow_exception(ctx_err);
    try {
      Theory ie = theory(Twist::InverseEuler);
      DualityTransforms tr = duality_transforms(ie);
      const GeometryTriple& g = geometry();
      ctx.emplace(SerreContext{g, s.truncation, std::move(ie),
                               theory(Twist::Euler),
                               build_qdm(g, QdmFlavor::PlainY, s.truncation),
                               build_qdm(g, QdmFlavor::CompactY, s.truncation),
                               build_qdm(g, QdmFlavor::NarrowY, s.truncation),
                               build_qdm(g, QdmFlavor::AmbientZ, s.truncation),
                               build_qdm(g, QdmFlavor::TwistedEuler,
                                         s.truncation),
                               std::move(tr)});
      return *ctx;
    } catch (...) {
      ctx_err = std::current_exception();
      throw;
    }
  };

  auto run_suite = [&](const std::string& name,
                       const std::function<void(SuiteResult&)>& body) {
    SuiteResult r;
    r.name = name;
    try {
      body(r);
    } catch (const NonConvex& e) {
      r.scopes.push_back(std::string("scope: ") + e.what());
    } catch (const MirrorMapOutOfRange& e) {
      r.scopes.push_back(std::string("scope: ") + e.what());
    } catch (const AmbientDegenerate& e) {
      r.scopes.push_back(std::string("scope: ") + e.what());
    } catch (const QsdError& e) {
      r.failures.push_back(std::string("error: ") + e.what());
    }
    constexpr std::size_t cap = 16;
    if (r.failures.size() > cap) {
      std::size_t extra = r.failures.size() - cap;
      r.failures.resize(cap);
      r.failures.push_back("(+" + std::to_string(extra) +
                           " more nonzero coefficients)");
    }
    r.status = !r.failures.empty() ? "fail"
                                   : (!r.scopes.empty() ? "scope" : "pass");
    rep.suites.push_back(std::move(r));
  };

  auto narrow_suite = [&](SuiteResult& r) {
    const GeometryTriple& g = geometry();
    std::size_t len = g.len();
    const std::vector<int>& nar = g.narrow_monos();
    const std::vector<int>& ker = g.kernel_monos();

    // orthogonality against the kernel characterizes the narrow monomials
    for (std::size_t j = 0; j < len; ++j) {
      bool orth = true;
      for (int k : ker)
        if (!g.pairing_x(CohClass::h_power(len, j),
                         CohClass::h_power(len, static_cast<std::size_t>(k)))
                 .is_zero())
          orth = false;
      bool in_nar = std::find(nar.begin(), nar.end(), static_cast<int>(j)) !=
                    nar.end();
      if (orth != in_nar)
        r.failures.push_back(
            "H^" + std::to_string(j) +
            ": kernel orthogonality disagrees with the narrow span");
    }

    // the narrow pairing matrix is nondegenerate
    if (!nar.empty()) {
      RatMat gram(nar.size(), RatVec(nar.size(), 0));
      bool rational = true;
      for (std::size_t i = 0; i < nar.size(); ++i)
        for (std::size_t j = 0; j < nar.size(); ++j) {
          Scalar v = g.narrow_pairing(
              CohClass::h_power(len, static_cast<std::size_t>(nar[i])),
              CohClass::h_power(len, static_cast<std::size_t>(nar[j])));
          if (!v.is_rational()) {
            rational = false;
            continue;
          }
          gram[i][j] = v.rational_part();
        }
      if (!rational)
        r.failures.push_back("narrow pairing produced an irrational value");
      else if (rank(gram) != nar.size())
        r.failures.push_back("narrow pairing matrix is singular");
    }

    // the comparison map has image exactly the narrow span
    {
      RatMat img;
      bool contained = true;
      for (std::size_t j = 0; j < len; ++j) {
        CohClass im = g.phi(CohClass::h_power(len, j));
        RatVec row(nar.size(), 0);
        for (std::size_t i = 0; i < len; ++i) {
          if (im.c[i].is_zero()) continue;
          auto slot = std::find(nar.begin(), nar.end(), static_cast<int>(i));
          if (slot == nar.end()) {
            contained = false;
            continue;
          }
          row[static_cast<std::size_t>(slot - nar.begin())] =
              im.c[i].rational_part();
        }
        img.push_back(std::move(row));
      }
      if (!contained)
        r.failures.push_back("comparison image leaves the narrow span");
      if (!nar.empty() && rank(img) != nar.size())
        r.failures.push_back("comparison image does not span the narrow space");
    }

    // cupping a kernel element into the comparison map gives zero, so the
    // compact cup does not depend on the chosen lift
    for (int k : ker)
      for (std::size_t j = 0; j < len; ++j)
        if (!g.phi(cup(CohClass::h_power(len, static_cast<std::size_t>(k)),
                       CohClass::h_power(len, j)))
                 .is_zero())
          r.failures.push_back("compact cup depends on the lift at H^" +
                               std::to_string(k) + " cup H^" +
                               std::to_string(j));

    Json dims;
    dims["narrow"] = nar.size();
    dims["kernel"] = ker.size();
    dims["ambient"] = g.ambient_monos().size();
    r.derived = std::move(dims);
  };

  auto flatness_suite = [&](SuiteResult& r) {
    const GeometryTriple& g = geometry();
    std::optional<QuantumDModule> plain_y, compact_y;
    for (QdmFlavor f :
         {QdmFlavor::PlainX, QdmFlavor::TwistedEuler, QdmFlavor::AmbientZ,
          QdmFlavor::PlainY, QdmFlavor::CompactY, QdmFlavor::NarrowY}) {
      QuantumDModule m = build_qdm(g, f, s.truncation);
      FlatnessReport fr = flatness_report(m);
      if (!fr.divisor_flat)
        r.failures.push_back(std::string(flavor_name(f)) +
                             ": divisor direction residual nonzero");
      if (!fr.z_flat)
        r.failures.push_back(std::string(flavor_name(f)) +
                             ": z direction residual nonzero");
      if (!fr.commuting)
        r.failures.push_back(std::string(flavor_name(f)) +
                             ": connection data does not commute");
      if (m.gram)
        collect_matrix(r.failures,
                       std::string(flavor_name(f)) + " pairing residual",
                       unitarity_residual(m));
      if (f == QdmFlavor::PlainY) plain_y.emplace(std::move(m));
      if (f == QdmFlavor::CompactY) compact_y.emplace(std::move(m));
    }
    collect_matrix(r.failures, "compact against plain pairing residual",
                   dual_unitarity_residual(*compact_y, *plain_y));
    collect_matrix(r.failures, "euler pairing residual, lambda kept",
                   theory_unitarity_residual(theory(Twist::Euler)));
    collect_matrix(r.failures, "inverse euler pairing residual, lambda kept",
                   theory_unitarity_residual(theory(Twist::InverseEuler)));
  };

  auto cone_suite = [&](SuiteResult& r) {
    const SerreContext& c = context();
    collect_matrix(r.failures, "compact transport against euler transport",
                   compact_vs_euler_residual(c));
    if (!c.tr.pushforward_matches_restriction)
      r.failures.push_back(
          "pushforward of the base form disagrees with its restriction");
    if (!c.tr.cone_potential_vanishes)
      r.failures.push_back(
          "cone potential does not vanish for the weightless cone");
    Json derived;
    derived["dual_parameter_h0"] = series_to_json(c.tr.t0);
    derived["dual_parameter_h2"] = series_to_json(c.tr.t2);
    derived["lambda_chart_ok"] = c.tr.lambda_chart_ok;
    r.derived = std::move(derived);
  };

  auto compact_suite = [&](SuiteResult& r) {
    const SerreContext& c = context();
    auto cols = ambient_reduction_residual(c);
    for (std::size_t j = 0; j < cols.size(); ++j)
      collect_vector(r.failures,
                     "restriction square column " + std::to_string(j),
                     cols[j]);
    auto sym = symplectic_residuals(c);
    for (std::size_t i = 0; i < sym.size(); ++i)
      collect_series(r.failures, "symplectic sample " + std::to_string(i),
                     sym[i]);
    try {
      collect_matrix(r.failures, "equivariant intertwining",
                     equivariant_intertwining_residual(c));
    } catch (const MirrorMapOutOfRange& e) {
      r.scopes.push_back(std::string("equivariant intertwining: ") + e.what());
    }
  };

  auto narrowqsd_suite = [&](SuiteResult& r) {
    const SerreContext& c = context();
    auto cols = narrow_square_residual(c);
    for (std::size_t j = 0; j < cols.size(); ++j)
      collect_vector(r.failures, "narrow square column " + std::to_string(j),
                     cols[j]);
    auto pr = narrow_pairing_residuals(c);
    for (std::size_t i = 0; i < pr.size(); ++i)
      collect_series(r.failures, "pairing sample " + std::to_string(i), pr[i]);
  };

  auto gamma_suite = [&](SuiteResult& r) {
    // reflection on a nilpotent of order six
    {
      std::size_t len7 = 7;
      Scalar two_pi_i = Rat(2) * pi_i_power(1);
      CohClass lhs = cup(gamma_line(len7, Rat(1)), gamma_line(len7, Rat(-1)));
      lhs = cup(lhs, CohClass::h_power(len7, 0) -
                         exp_class(CohClass::h_power(len7, 1, two_pi_i)));
      CohClass rhs =
          cup(exp_class(CohClass::h_power(len7, 1, pi_i_power(1))),
              CohClass::h_power(len7, 1, Rat(-1) * two_pi_i));
      if (!(lhs == rhs))
        r.failures.push_back("gamma reflection fails on the order six nilpotent");
    }
    const GeometryTriple& g = geometry();
    if (!(gamma_hat_y(g) == cup(gamma_hat_x(g), gamma_hat_bundle(g, true))))
      r.failures.push_back(
          "gamma class of the total space does not factor through the base");
    {
      std::vector<Scalar> gz = gamma_hat_z(g);
      std::vector<Scalar> on_x = g.j_star(
          cup(gamma_hat_x(g), invert_class(gamma_hat_bundle(g, false))));
      for (std::size_t i = 0; i < gz.size(); ++i)
        if (!(gz[i] - on_x[i]).is_zero())
          r.failures.push_back("adjunction gamma class mismatch at slot " +
                               std::to_string(i));
    }
    const SerreContext& c = context();
    for (int a : {-1, 0, 1}) {
      collect_vector(r.failures,
                     "gamma square O(" + std::to_string(a) + ") narrow route",
                     gamma_square_residual(c, a, false));
      collect_vector(r.failures,
                     "gamma square O(" + std::to_string(a) + ") compact route",
                     gamma_square_residual(c, a, true));
    }
    QuantumDModule px = build_qdm(g, QdmFlavor::PlainX, s.truncation);
    for (int a : {-1, 0, 1})
      for (int b : {-1, 0, 1})
        collect_series(r.failures,
                       "base pairing (" + std::to_string(a) + "," +
                           std::to_string(b) + ")",
                       euler_pairing_residual(px, a, b));
  };

  auto invariants_suite = [&](SuiteResult& r) {
    const GeometryTriple& g = geometry();
    std::vector<Scalar> inv = local_invariants(g, s.truncation);
    Json vals;
    for (std::size_t d = 0; d < inv.size(); ++d)
      vals[std::to_string(d + 1)] = inv[d].to_text();
    Json derived;
    derived["local_invariants"] = std::move(vals);
    r.derived = std::move(derived);
  };

  for (const std::string& name : s.suites) {
    if (name == "narrow") run_suite(name, narrow_suite);
    else if (name == "flatness") run_suite(name, flatness_suite);
    else if (name == "cone") run_suite(name, cone_suite);
    else if (name == "compact") run_suite(name, compact_suite);
    else if (name == "narrowqsd") run_suite(name, narrowqsd_suite);
    else if (name == "gamma") run_suite(name, gamma_suite);
    else if (name == "invariants") run_suite(name, invariants_suite);
  }

  rep.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

// scenarios of a batch run in parallel; the cache serializes its writes
inline std::vector<Report> run_batch(const std::vector<Scenario>& list,
                                     const std::string& cache_dir) {
  std::vector<std::future<Report>> futures;
  futures.reserve(list.size());
  for (const Scenario& s : list)
    futures.push_back(std::async(std::launch::async, [s, cache_dir]() {
      return run_scenario(s, cache_dir);
    }));
  std::vector<Report> out;
  out.reserve(futures.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

}  // namespace qsd
