#include "hypergconv/transcript.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "hypergconv/errors.hpp"

namespace hgc {

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const Json& j) {
  if (!j.is_array()) throw DomainError("expected a numeric array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw DomainError("expected a numeric array");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json interp_to_json(const InterpData& data) {
  Json j;
  j["d"] = data.items.empty() ? 0 : data.items.front().x.dim();
  j["mu"] = data.mu;
  j["items"] = Json::array();
  for (const OracleSample& s : data.items) j["items"].push_back({{"F", s.F}, {"x", to_json(s.x.coords())}, {"g", to_json(s.g.vec)}});
  return j;
}

InterpData interp_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("items") || !j.contains("mu")) throw DomainError("interpolation JSON needs mu and items");
  InterpData data;
  data.mu = j.at("mu").get<double>();
  const int d = j.value("d", -1);
  for (const Json& it : j.at("items")) {
    Vec x = vec_from_json(it.at("x"));
    Vec g = vec_from_json(it.at("g"));
    if (d >= 0 && (x.size() != d + 1 || g.size() != d + 1)) throw DimensionError("item dimension differs from d");
    const HPoint p = HPoint::from_coords(std::move(x));
    data.items.push_back({it.at("F").get<double>(), p, HTangent{p, std::move(g)}});
  }
  data.validate();
  return data;
}

void write_game_jsonl(std::ostream& os, const NonsmoothGame& game) {
  const auto& hist = game.history();
  const auto& sel = game.selections();
  for (std::size_t k = 0; k < hist.size(); ++k) {
    Json j;
    j["k"] = k;
    j["x"] = to_json(hist[k].x.coords());
    j["F"] = hist[k].F;
    j["g"] = to_json(hist[k].g.vec);
    j["chosen_i"] = sel[k].i;
    j["chosen_s"] = sel[k].s;
    j["margins"] = {{"h", sel[k].h}, {"runner_up", sel[k].runner_up}, {"tied", sel[k].tied}, {"value_tied", sel[k].value_tied}};
    os << j.dump() << '\n';
  }
}

Json cut_transcript_json(const CutTranscript& tr) {
  Json j;
  j["player"] = tr.player;
  j["d"] = tr.d;
  j["r"] = tr.r;
  j["eps"] = tr.eps;
  j["seed"] = tr.seed;
  j["initial_candidates"] = tr.initial_candidates;
  j["exhausted"] = tr.exhausted;
  j["rounds_survived"] = tr.rounds_survived;
  j["quarter_law_violations"] = tr.quarter_law_violations;
  j["target_rounds"] = tr.target_rounds;
  j["all_consistent"] = tr.all_consistent;
  j["xstar_replay_ok"] = tr.xstar_replay_ok;
  if (tr.has_xstar) j["xstar"] = to_json(tr.xstar.coords());
  j["rounds"] = Json::array();
  for (const CutRound& rd : tr.rounds) {
    j["rounds"].push_back({{"k", rd.k},
                           {"x", to_json(rd.x.coords())},
                           {"g", to_json(rd.g.vec)},
                           {"before", rd.before},
                           {"after", rd.after},
                           {"cut", rd.cut},
                           {"normal_index", rd.normal_index},
                           {"quarter_ok", rd.quarter_ok},
                           {"consistent", rd.consistent}});
  }
  return j;
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace hgc
