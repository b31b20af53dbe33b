// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

// Threshold comparison on encrypted scores: a Chebyshev fit of the step
// function at delta, evaluated with Paterson-Stockmeyer in the Chebyshev basis.

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "encsim/he_sim.hpp"

namespace encsim {

enum class OutputRange {
  Unit,       // step targets {0, 1}, decision at 0.5
  Literal02,  // sign + 1 targets {0, 2}, decision at 1
};

int degreeForDepth(int kappa);
std::pair<int, int> psSplit(int n);
std::vector<double> fitSignCoefficients(double delta, int n,
                                        OutputRange range = OutputRange::Unit);
double clenshawOracle(double x, std::span<const double> coefficients);

struct ChebyshevComparator {
  std::vector<double> coefficients;
  int degree = 0;
  double threshold = 0.0;
  int psBaby = 1;
  int psGiant = 1;
  int depthBudget = 0;
  OutputRange range = OutputRange::Unit;

  static ChebyshevComparator make(int kappa, double delta, OutputRange range = OutputRange::Unit);
  // Same degree and split, refitted at a new threshold.
  ChebyshevComparator withThreshold(double delta) const;
  double decisionLevel() const { return range == OutputRange::Unit ? 0.5 : 1.0; }
  // Multiplicative levels evalChebPS consumes.
  int levelsRequired() const;
};

// Levels consumed by the recursive PS evaluation of `coefficients`.
int psDepth(std::span<const double> coefficients, int d1, int d2);
// The PS schedule executed on plain doubles.
double evalChebPSPlain(double x, std::span<const double> coefficients, int d1, int d2);

CipherVector evalChebPS(HeContext& ctx, const CipherVector& ct, const ChebyshevComparator& cmp);
CipherVector evalChebPS(HeContext& ctx, const CipherVector& ct,
                        std::span<const double> coefficients, int d1, int d2);

}  // namespace encsim
