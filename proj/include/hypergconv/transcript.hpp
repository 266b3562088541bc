#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypergconv/cutting_planes.hpp"
#include "hypergconv/interpolation.hpp"
#include "hypergconv/resisting.hpp"

namespace hgc {

using Json = nlohmann::json;

Json to_json(const Vec& v);
Vec vec_from_json(const Json& j);

/// {d, mu, items: [{F, x: [...], g: [...]}]}. Parsing validates the data and
/// throws DomainError / DimensionError on malformed input.
Json interp_to_json(const InterpData& data);
InterpData interp_from_json(const Json& j);

/// One JSON object per query: {k, x, F, g, chosen_i, chosen_s, margins}.
void write_game_jsonl(std::ostream& os, const NonsmoothGame& game);

Json cut_transcript_json(const CutTranscript& tr);

/// Shortest decimal text that round-trips the double.
std::string fmt_double(double v);

/// RFC 4180 quoting for fields containing commas, quotes or newlines.
std::string csv_field(const std::string& s);

}  // namespace hgc
