// Regenerates the shipped config files from the builtin defaults so the two
// never drift apart. Run from the repository root:
//   build/tools/gen_configs
#include <iostream>

#include "taco/catalog.hpp"
#include "taco/config.hpp"
#include "taco/reconstructor.hpp"
#include "taco/text_graph.hpp"
#include "taco/type_extractor.hpp"

int main() {
    taco::KeywordBase::builtin().save("configs/keywords.json");
    taco::TypeCatalog::builtin().save("configs/type_catalog.json");
    taco::build_trigger_base({"which", "one", "of", "the", "following"}, 2)
        .save("configs/triggers.json");
    taco::TrainConfig().save("configs/train_default.json");
    taco::save_stopwords(taco::default_stopwords(), "configs/stopwords.txt");
    std::cout << "wrote configs/{keywords,type_catalog,triggers,train_default}.json "
                 "and configs/stopwords.txt\n";
    return 0;
}
