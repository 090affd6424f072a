#pragma once

#include <string>
#include <vector>

namespace uhl::cli {

/// One output file of a figure recipe: the subcommand arguments that produce it.
/// The token "{n}" inside an argument is replaced by the grid resolution.
struct RecipeStep {
  std::string file;
  std::vector<std::string> args;
};

struct FigureRecipe {
  std::string name;
  std::string description;
  std::vector<RecipeStep> steps;
};

const std::vector<FigureRecipe>& figure_recipes();

/// Recipes selected by `name`: an exact match, or every panel `name` + letter (fig6 -> fig6a..fig6d).
std::vector<const FigureRecipe*> select_recipes(const std::string& name);

/// Arguments of `step` with "{n}" expanded.
std::vector<std::string> expand(const RecipeStep& step, int resolution);

}  // namespace uhl::cli
