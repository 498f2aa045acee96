#pragma once

#include "kdv5/experiments.hpp"

#include <string>

namespace kdv5 {

/// Flat `key = value` text, one entry per line, `#` starts a comment.  Values are JSON; a bare
/// word is read as a string.  Keys:
///   experiment        simulate | propagation | decay | bootstrap
///   model             catalog name or {"a5":..,"a3":..,"a1":..,"monomials":[..]}
///   model.params      [..] parameters of a catalog model
///   grid.L, grid.N
///   solver.dt         <= 0 picks dt from the stability rule with dt_safety
///   solver.t_end, solver.scheme (ETDRK4 | IFRK4), solver.dealias (none | two_thirds | pad2),
///   solver.stride, solver.seam_margin
///   data.id, data.params ({"name": number, ..})
///   seed
///   functionals       [{"kind":..,"l":..,"n":..,"eps":..,"b":..,"nu":..}, ..]
///   window.x0, window.eps, window.b, window.R, window.nu (number or list)
///   l, n, dt_safety
/// Unknown keys, repeated keys and malformed values raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON of every field, keys sorted; equal configs give equal text.
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace kdv5
