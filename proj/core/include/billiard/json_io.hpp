#pragma once

#include <string>

#include "billiard/dynamics.hpp"
#include "billiard/geometry.hpp"
#include "billiard/wavefunction.hpp"

namespace billiard {

// ---------------------------------------------------------------------------
// Versioned JSON serialization ("schema": "v1") and field exports. Exact
// coordinates are stored as rational parts plus basis-atom terms so that a
// round trip reproduces the document byte for byte.
// ---------------------------------------------------------------------------

std::string spec_to_json(const BilliardSpec& spec);
BilliardSpec spec_from_json(const std::string& text);

std::string curved_to_json(const CurvedBilliard& cb);
CurvedBilliard curved_from_json(const std::string& text);

// True when the document describes a curved billiard (has "circles").
bool json_is_curved(const std::string& text);

// Whole-file helpers; EmptyInput when the file cannot be read or written.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

BilliardSpec load_spec_file(const std::string& path);
CurvedBilliard load_curved_file(const std::string& path);

// Sampled wavefunction as CSV rows "x,y,re,im,abs" (points inside the domain
// only) and as a binary 8-bit PGM image scaled to the in-domain maximum of
// the magnitude (outside pixels are black).
void write_field_csv(const std::string& path, const ScalarField& field);
void write_field_pgm(const std::string& path, const ScalarField& field);

}  // namespace billiard
