#include "figures.hpp"

#include <cctype>
#include <cstdio>

#include "uhlmann_lab/analysis.hpp"

namespace uhl::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

RecipeStep composite_g_theta(const std::string& file, double T) {
  return {file, {"phase-map", "--target", "composite", "--g", "0:2:{n}", "--theta", "0:pi:{n}", "--T", num(T)}};
}

RecipeStep subsystem_g_theta(const std::string& file, const char* which, double T) {
  return {file, {"phase-map", "--subsystem", which, "--g", "0:2:{n}", "--theta", "0:pi:{n}", "--T", num(T)}};
}

std::vector<FigureRecipe> build() {
  const double tc = critical_constants().T_c;
  std::vector<FigureRecipe> r;

  r.push_back({"fig1",
               "composite Uhlmann phase at T = 0.01 beside the ground-state Berry phase, with their distance",
               {{"fig1.csv",
                 {"phase-map", "--target", "composite", "--compare-berry", "--g", "0:2:{n}", "--theta", "0:pi:{n}",
                  "--T", "0.01"}}}});

  {
    FigureRecipe f{"fig2", "composite phase over (g, theta) at six temperatures", {}};
    const double temps[] = {0.02, 0.05, 0.2, 0.4, 0.6, tc};
    const char panels[] = "abcdef";
    for (int k = 0; k < 6; ++k)
      f.steps.push_back(composite_g_theta(std::string("fig2") + panels[k] + ".csv", temps[k]));
    r.push_back(f);
  }
  {
    FigureRecipe f{"fig3", "composite phase over (T, theta) at six couplings", {}};
    const double gs[] = {0.02, 0.2, 0.4, 0.6, 0.8, 0.9};
    const char panels[] = "abcdef";
    for (int k = 0; k < 6; ++k)
      f.steps.push_back({std::string("fig3") + panels[k] + ".csv",
                         {"phase-map", "--target", "composite", "--g", num(gs[k]), "--theta", "0:pi:{n}", "--T",
                          "0.01:1:{n}"}});
    r.push_back(f);
  }
  {
    FigureRecipe f{"fig4", "composite Argand curves z(theta) at g = 0.6 across both transitions", {}};
    for (double T : {0.23, 0.5, 0.6, 0.75})
      f.steps.push_back({"fig4_T" + tag(T) + ".csv",
                         {"argand", "--subsystem", "AB", "--g", "0.6", "--T", num(T), "--samples", "{n}"}});
    r.push_back(f);
  }
  r.push_back({"fig5",
               "composite phase boundary over (g, T) at the equator",
               {{"fig5.csv",
                 {"phase-map", "--target", "composite", "--g", "0:2:{n}", "--theta", "pi/2", "--T", "0.01:1:{n}"}}}});
  {
    const double gs[] = {0.1, 0.3, 0.5, 0.7};
    const char panels[] = "abcd";
    for (int k = 0; k < 4; ++k) {
      const std::string name = std::string("fig6") + panels[k];
      r.push_back({name,
                   "heat capacity, two-level parts, Schottky C24 and composite phase versus T at g = " + tag(gs[k]),
                   {{name + ".csv", {"heat-capacity", "--g", num(gs[k]), "--T", "0.002:1:{n}"}}}});
    }
  }
  {
    FigureRecipe f{"fig7", "driven-spin phase over (g, theta) at six temperatures, plus Bloch surfaces", {}};
    const double temps[] = {0.02, 0.2, 0.5, 0.6, 0.7, tc};
    const char panels[] = "abcdef";
    for (int k = 0; k < 6; ++k)
      f.steps.push_back(subsystem_g_theta(std::string("fig7") + panels[k] + ".csv", "A", temps[k]));
    for (double g : {0.2, 0.6, 1.0, 1.5})
      f.steps.push_back({"fig7_bloch_g" + tag(g) + ".csv",
                         {"bloch", "--subsystem", "A", "--g", num(g), "--T", "0.2", "--theta", "0:pi:{n}", "--phi",
                          "0:2*pi:{n}"}});
    r.push_back(f);
  }
  {
    FigureRecipe f{"fig8", "undriven-spin phase over (g, theta), Argand curves and Bloch surfaces", {}};
    const double temps[] = {0.01, 0.1, 0.15, 0.2, 0.22, 0.25};
    const char panels[] = "abcdef";
    for (int k = 0; k < 6; ++k)
      f.steps.push_back(subsystem_g_theta(std::string("fig8") + panels[k] + ".csv", "B", temps[k]));
    for (double g : {0.597, 0.8, 1.12, 1.5}) {
      f.steps.push_back({"fig8_argand_g" + tag(g) + ".csv",
                         {"argand", "--subsystem", "B", "--g", num(g), "--T", "0.2", "--samples", "{n}"}});
      f.steps.push_back({"fig8_bloch_g" + tag(g) + ".csv",
                         {"bloch", "--subsystem", "B", "--g", num(g), "--T", "0.2", "--theta", "0:pi:{n}", "--phi",
                          "0:2*pi:{n}"}});
    }
    r.push_back(f);
  }
  r.push_back({"fig9",
               "driven-spin phase over (g, T) at the equator and its traced boundary",
               {{"fig9_map.csv",
                 {"phase-map", "--subsystem", "A", "--g", "0:2:{n}", "--theta", "pi/2", "--T", "0.01:1.2:{n}"}},
                {"fig9_boundary.csv", {"critical-curve", "--subsystem", "A"}}}});
  r.push_back({"fig10",
               "undriven-spin phase over (g, T) at the equator and its traced boundary",
               {{"fig10_map.csv",
                 {"phase-map", "--subsystem", "B", "--g", "0:2:{n}", "--theta", "pi/2", "--T", "0.01:0.4:{n}"}},
                {"fig10_boundary.csv", {"critical-curve", "--subsystem", "B"}}}});
  return r;
}

}  // namespace

const std::vector<FigureRecipe>& figure_recipes() {
  static const std::vector<FigureRecipe> recipes = build();
  return recipes;
}

std::vector<const FigureRecipe*> select_recipes(const std::string& name) {
  std::vector<const FigureRecipe*> out;
  for (const auto& r : figure_recipes())
    if (r.name == name) return {&r};
  for (const auto& r : figure_recipes())
    if (r.name.size() == name.size() + 1 && r.name.compare(0, name.size(), name) == 0 &&
        std::isalpha(static_cast<unsigned char>(r.name.back())))
      out.push_back(&r);
  return out;
}

std::vector<std::string> expand(const RecipeStep& step, int resolution) {
  std::vector<std::string> args = step.args;
  const std::string n = std::to_string(resolution);
  for (auto& a : args)
    for (auto at = a.find("{n}"); at != std::string::npos; at = a.find("{n}")) a.replace(at, 3, n);
  return args;
}

}  // namespace uhl::cli
