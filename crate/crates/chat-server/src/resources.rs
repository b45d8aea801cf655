//! Read-only resources shared by every room: lexicons, the dialogue-act
//! model, scenario kits and questionnaire item sets.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use affect_core::control::ScenarioKit;
use affect_core::lexicon::load_lexicons;
use affect_core::perception::dialogue_act::load_corpus;
use affect_core::perception::{ClassifierVersion, LinearDaModel, Perceiver, SentimentConfig, TrainConfig};
use affect_core::{bundled_data_dir, default_lexicon_dir};

use crate::config::ScenarioKind;
use crate::questionnaire::ItemSet;
use crate::ChatError;

#[derive(Debug, Clone)]
pub struct Resources {
    pub perceiver: Perceiver,
    kits: BTreeMap<ScenarioKind, Arc<ScenarioKit>>,
    dyadic_items: ItemSet,
    triadic_items: ItemSet,
}

fn res_err(e: impl std::fmt::Display) -> ChatError {
    ChatError::Resource(e.to_string())
}

impl Resources {
    /// Loads everything below `data_dir`. Without `model` the dialogue-act
    /// classifier is trained from `<data>/corpus/da.tsv`.
    pub fn load(data_dir: &Path, lexicon_dir: &Path, model: Option<&Path>) -> Result<Self, ChatError> {
        let bundle = Arc::new(load_lexicons(lexicon_dir).map_err(res_err)?);
        let model = match model {
            Some(p) => LinearDaModel::load(p).map_err(res_err)?,
            None => {
                let corpus = load_corpus(&data_dir.join("corpus/da.tsv")).map_err(res_err)?;
                LinearDaModel::train(&corpus, &bundle.modifiers, TrainConfig::default()).map_err(res_err)?
            }
        };
        let mut perceiver = Perceiver::new(bundle.clone(), Arc::new(model));
        perceiver.sentiment = SentimentConfig::load(lexicon_dir, ClassifierVersion::V3_1).map_err(res_err)?;

        let mut kits = BTreeMap::new();
        for kind in ScenarioKind::ALL {
            let kit = ScenarioKit::load(&data_dir.join("scenarios").join(kind.kit_file()), &bundle).map_err(res_err)?;
            if kit.humans != kind.humans() {
                return Err(ChatError::Resource(format!("{}: expected {} humans", kind.kit_file(), kind.humans())));
            }
            kits.insert(kind, Arc::new(kit));
        }

        let items = |file: &str, default: ItemSet| {
            let p = data_dir.join("questionnaire").join(file);
            if p.is_file() {
                ItemSet::load(&p)
            } else {
                Ok(default)
            }
        };
        Ok(Self {
            perceiver,
            kits,
            dyadic_items: items("dyadic.txt", ItemSet::dyadic())?,
            triadic_items: items("triadic.txt", ItemSet::triadic())?,
        })
    }

    /// The resources shipped in the repository (`AFFECT_LEXICON_DIR` honoured).
    pub fn bundled() -> Result<Self, ChatError> {
        Self::load(&bundled_data_dir(), &default_lexicon_dir(), None)
    }

    pub fn kit(&self, kind: ScenarioKind) -> &Arc<ScenarioKit> {
        &self.kits[&kind]
    }

    pub fn items(&self, kind: ScenarioKind) -> &ItemSet {
        if kind.humans() == 2 {
            &self.triadic_items
        } else {
            &self.dyadic_items
        }
    }
}
