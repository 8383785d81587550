#include <cmath>
#include <cstdio>

#include "ddestab/criteria.hpp"

int main() {
  const auto k = ddestab::constants_c_thetac();
  std::printf("c = %.6f theta_c = %.6f\n", k.c, k.theta_c);
  return std::abs(k.c - 0.7246) < 1e-4 ? 0 : 1;
}
