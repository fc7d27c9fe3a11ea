use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use super::artifacts::*;
use super::build::assemble;
use super::config::RunConfig;
use super::{PipelineError, RunReport, Stage, StageCause};
use crate::enrich::{
    propagate_recipe_diets, run_ordered, ChatBackend, DietFlags, EnrichError, Enricher,
    HttpChatBackend, PromptPack, TranscriptBackend,
};
use crate::graphrag::{build_fact_index, evaluate, load_qa, Answer, FactIndex, GraphRag};
use crate::ingest::{
    dedupe, load_gi_table, load_nutrient_db, load_substitutions, parse_recipe_corpus,
    NutrientSource, RawRecipe,
};
use crate::kg::Graph;
use crate::matching::{
    link_substitutes, Embedder, GiMatcher, HttpEmbedder, MockEmbedder, NutrientMatcher,
};
use crate::vocab::Vocabulary;

/// A configured pipeline with its backends.
#[derive(Clone)]
pub struct Pipeline {
    config: RunConfig,
    vocab: Arc<Vocabulary>,
    enricher: Enricher,
    embedder: Arc<dyn Embedder>,
}

fn stage_err(stage: Stage) -> impl Fn(StageCause) -> PipelineError {
    move |cause| PipelineError::Stage { stage, cause }
}

impl Pipeline {
    /// Build the backends named by the configuration: transcript replay and
    /// the hashing embedder in mock mode, HTTP clients otherwise.
    pub fn new(config: RunConfig) -> Result<Self, PipelineError> {
        let chat: Arc<dyn ChatBackend> = if config.mock {
            let path =
                config.chat.transcript.as_deref().ok_or_else(|| {
                    PipelineError::Config("mock mode needs chat.transcript".into())
                })?;
            Arc::new(
                TranscriptBackend::load(path).map_err(|e| PipelineError::Config(e.to_string()))?,
            )
        } else {
            Arc::new(
                HttpChatBackend::new(
                    config.chat.endpoint.clone(),
                    config.chat.model.clone(),
                    config.generation.clone(),
                    Duration::from_secs(config.chat.timeout_secs),
                )
                .map_err(|e| PipelineError::Config(e.to_string()))?,
            )
        };
        let embedder: Arc<dyn Embedder> = if config.mock {
            match &config.embedding.pins {
                Some(p) => Arc::new(
                    MockEmbedder::load_pins(p).map_err(|e| PipelineError::Config(e.to_string()))?,
                ),
                None => Arc::new(MockEmbedder::new()),
            }
        } else {
            Arc::new(
                HttpEmbedder::new(
                    config.embedding.endpoint.clone(),
                    config.embedding.model.clone(),
                    Duration::from_secs(config.embedding.timeout_secs),
                )
                .map_err(|e| PipelineError::Config(e.to_string()))?,
            )
        };
        Self::with_backends(config, chat, embedder)
    }

    /// Use the given backends instead of the configured ones.
    pub fn with_backends(
        config: RunConfig,
        chat: Arc<dyn ChatBackend>,
        embedder: Arc<dyn Embedder>,
    ) -> Result<Self, PipelineError> {
        let vocab = match (&config.inputs.categories, &config.inputs.cuisines) {
            (Some(seed), Some(cuisines)) => Vocabulary::load(seed, cuisines)
                .map_err(|e| PipelineError::Config(e.to_string()))?,
            _ => Vocabulary::bundled().clone(),
        };
        let prompts = match &config.inputs.prompts {
            Some(dir) => {
                PromptPack::load_dir(dir).map_err(|e| PipelineError::Config(e.to_string()))?
            }
            None => PromptPack::bundled(),
        };
        let vocab = Arc::new(vocab);
        let enricher = Enricher::new(chat, prompts, vocab.clone(), config.generation.clone());
        Ok(Pipeline {
            config,
            vocab,
            enricher,
            embedder,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn enricher(&self) -> &Enricher {
        &self.enricher
    }

    pub fn embedder(&self) -> Arc<dyn Embedder> {
        self.embedder.clone()
    }

    fn path(&self, name: &str) -> std::path::PathBuf {
        self.config.artifact(name)
    }

    pub fn ingest(&self) -> Result<IngestArtifact, PipelineError> {
        self.run_ingest().map_err(stage_err(Stage::Ingest))
    }

    fn run_ingest(&self) -> Result<IngestArtifact, StageCause> {
        let i = &self.config.inputs;
        let parsed = parse_recipe_corpus(&i.recipes)?;
        let records = parsed.recipes.len() + parsed.rejected.len();
        let valid = parsed.recipes.len();
        let recipes = dedupe(parsed.recipes);
        let swiss = load_nutrient_db(&i.swiss, NutrientSource::Swiss)?;
        let usda = load_nutrient_db(&i.usda, NutrientSource::Usda)?;
        let gi = load_gi_table(&i.gi)?;
        let subs = load_substitutions(&i.substitutions)?;
        let mut rejected = BTreeMap::new();
        for r in &parsed.rejected {
            *rejected.entry(r.reason.to_string()).or_insert(0) += 1;
        }
        let artifact = IngestArtifact {
            counts: IngestCounts {
                records,
                kept: recipes.len(),
                rejected,
                duplicates_removed: valid - recipes.len(),
                swiss_rows: swiss.entries.len(),
                usda_rows: usda.entries.len(),
                gi_rows: gi.entries.len(),
                substitution_entries: subs.entries.len(),
                skipped_table_rows: swiss.skipped.len()
                    + usda.skipped.len()
                    + gi.skipped.len()
                    + subs.skipped.len(),
            },
            recipes,
            rejected: parsed.rejected,
        };
        write_json(&self.path(INGEST_FILE), &artifact)?;
        Ok(artifact)
    }

    pub fn enrich(&self) -> Result<EnrichArtifact, PipelineError> {
        self.run_enrich().map_err(stage_err(Stage::Enrich))
    }

    fn enrich_recipe(&self, raw: &RawRecipe) -> Result<CanonicalRecipe, EnrichError> {
        let e = &self.enricher;
        let english = e.translate_recipe(raw)?;
        let mut lines = Vec::with_capacity(english.ingredient_lines.len());
        for line in &english.ingredient_lines {
            lines.push(EnrichedLine {
                line: line.clone(),
                split: e.split_ingredient_line(line)?,
            });
        }
        let names: Vec<String> = lines.iter().filter_map(|l| l.split.name.clone()).collect();
        let tags = e.tag_recipe(&english, &names)?;
        Ok(CanonicalRecipe {
            id: raw.id().to_string(),
            name: english.name.clone(),
            source_language: raw.language,
            description: english.description.clone(),
            keywords: english.keywords.clone(),
            instructions: english.instructions.clone(),
            lines,
            utensils: english.utensils.clone(),
            nutrition: english.nutrition.clone(),
            tags,
            diets: DietFlags::default(),
            warnings: Vec::new(),
        })
    }

    fn run_enrich(&self) -> Result<EnrichArtifact, StageCause> {
        let ingest: IngestArtifact = read_json(&self.path(INGEST_FILE))?;
        let limit = self.config.max_in_flight;
        let mut counts = EnrichCounts {
            recipes_in: ingest.recipes.len(),
            ..EnrichCounts::default()
        };
        let mut failures = Vec::new();
        let mut recipes = Vec::new();
        let outcomes = run_ordered(&ingest.recipes, limit, |r| self.enrich_recipe(r));
        for (raw, outcome) in ingest.recipes.iter().zip(outcomes) {
            match outcome {
                Ok(r) => recipes.push(r),
                Err(EnrichError::Backend(b)) => {
                    return Err(StageCause::Enrich(EnrichError::Backend(b)))
                }
                Err(e) => {
                    tracing::warn!(recipe = raw.id(), error = %e, "recipe enrichment failed");
                    failures.push(EnrichFailure {
                        item: raw.id().to_string(),
                        error: e.to_string(),
                    });
                }
            }
        }
        let names: Vec<String> = recipes
            .iter()
            .flat_map(|r| r.ingredient_names().map(str::to_string))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let outcomes = run_ordered(&names, limit, |n| self.enricher.label_ingredient(n));
        let mut labels = BTreeMap::new();
        for (name, outcome) in names.iter().zip(outcomes) {
            match outcome {
                Ok(l) => {
                    labels.insert(name.clone(), l);
                }
                Err(EnrichError::Backend(b)) => {
                    return Err(StageCause::Enrich(EnrichError::Backend(b)))
                }
                Err(e) => {
                    tracing::warn!(ingredient = name, error = %e, "ingredient labelling failed");
                    counts.ingredient_failures += 1;
                    failures.push(EnrichFailure {
                        item: name.clone(),
                        error: e.to_string(),
                    });
                }
            }
        }
        let vocab = &self.vocab;
        let unlabeled = DietFlags::closed(Vec::new(), vocab);
        for r in &mut recipes {
            let flags: Vec<DietFlags> = r
                .ingredient_names()
                .map(|n| {
                    labels
                        .get(n)
                        .map_or_else(|| unlabeled.clone(), |l| l.diets.clone())
                })
                .collect();
            let (diets, warning) = propagate_recipe_diets(&flags, vocab);
            r.diets = diets;
            r.warnings.extend(warning);
        }
        counts.recipes_enriched = recipes.len();
        counts.recipes_failed = ingest.recipes.len() - recipes.len();
        counts.translated = recipes
            .iter()
            .filter(|r| r.source_language != crate::ingest::Language::En)
            .count();
        counts.lines_split = recipes.iter().map(|r| r.lines.len()).sum();
        counts.utensil_only_lines = recipes
            .iter()
            .flat_map(|r| &r.lines)
            .filter(|l| l.split.is_utensil_only())
            .count();
        counts.ingredients = names.len();
        counts.ingredients_labeled = labels.len();
        counts.allergen_labels = labels.values().map(|l| l.allergens.len()).sum();
        counts.sfp_assigned = labels.values().filter(|l| l.sfp.is_some()).count();
        counts.ingredient_diet_labels = labels
            .values()
            .map(|l| l.diets.restrictions(vocab).count())
            .sum();
        counts.recipe_diet_labels = recipes
            .iter()
            .map(|r| r.diets.restrictions(vocab).count())
            .sum();
        counts.cuisines_assigned = recipes.iter().filter(|r| r.tags.cuisine.is_some()).count();
        counts.season_labels = recipes.iter().map(|r| r.tags.seasons.len()).sum();
        counts.warnings = recipes.iter().map(|r| r.warnings.len()).sum::<usize>()
            + labels.values().map(|l| l.warnings.len()).sum::<usize>();
        let artifact = EnrichArtifact {
            counts,
            recipes,
            labels,
            failures,
        };
        write_json(&self.path(ENRICH_FILE), &artifact)?;
        Ok(artifact)
    }

    pub fn match_ingredients(&self) -> Result<MatchArtifact, PipelineError> {
        self.run_match().map_err(stage_err(Stage::Match))
    }

    fn run_match(&self) -> Result<MatchArtifact, StageCause> {
        let enriched: EnrichArtifact = read_json(&self.path(ENRICH_FILE))?;
        let i = &self.config.inputs;
        let embedder = self.embedder.as_ref();
        let policy = self.config.matching;
        let nutrients = NutrientMatcher::new(
            load_nutrient_db(&i.swiss, NutrientSource::Swiss)?.entries,
            load_nutrient_db(&i.usda, NutrientSource::Usda)?.entries,
            embedder,
            policy,
        )?;
        let gi = GiMatcher::new(load_gi_table(&i.gi)?.entries, embedder, policy)?;
        let names: BTreeSet<&str> = enriched
            .recipes
            .iter()
            .flat_map(|r| r.ingredient_names())
            .collect();
        let mut counts = MatchCounts {
            ingredients: names.len(),
            ..MatchCounts::default()
        };
        let mut ingredients = Vec::new();
        for name in names {
            let n = nutrients
                .resolve_nutrients(name, embedder)?
                .map(|m| MatchedProps {
                    props: m.props(),
                    result: m.result,
                });
            let g = gi
                .attach_gi(name, embedder)?
                .map(|(result, props)| MatchedProps { result, props });
            match &n {
                Some(m) => {
                    *counts.ladder.entry(m.result.rung()).or_insert(0) += 1;
                    counts.low_confidence += usize::from(m.result.low_confidence);
                    counts.ties += usize::from(!m.result.tied.is_empty());
                }
                None => counts.without_nutrients.push(name.to_string()),
            }
            counts.gi_attached += usize::from(g.is_some());
            ingredients.push(IngredientMatch {
                name: name.to_string(),
                nutrients: n,
                gi: g,
            });
        }
        let artifact = MatchArtifact {
            counts,
            ingredients,
        };
        write_json(&self.path(MATCH_FILE), &artifact)?;
        Ok(artifact)
    }

    pub fn build_graph(&self) -> Result<(Graph, BuildArtifact), PipelineError> {
        self.run_build().map_err(stage_err(Stage::Build))
    }

    fn run_build(&self) -> Result<(Graph, BuildArtifact), StageCause> {
        let enriched: EnrichArtifact = read_json(&self.path(ENRICH_FILE))?;
        let matched: MatchArtifact = read_json(&self.path(MATCH_FILE))?;
        let (mut graph, instruction_uses) = assemble(
            &enriched.recipes,
            &enriched.labels,
            &matched.ingredients,
            &self.vocab,
        )?;
        let subs = load_substitutions(&self.config.inputs.substitutions)?;
        let substitutions = link_substitutes(
            &subs.entries,
            &mut graph,
            self.embedder.as_ref(),
            self.config.matching,
        )?;
        graph.export_snapshot(&self.path(SNAPSHOT_FILE))?;
        let artifact = BuildArtifact {
            stats: graph.stats(),
            substitutions,
            instruction_uses,
            issues: graph.validate(),
        };
        write_json(&self.path(BUILD_FILE), &artifact)?;
        Ok((graph, artifact))
    }

    pub fn load_graph(&self) -> Result<Graph, PipelineError> {
        Graph::import_snapshot(&self.path(SNAPSHOT_FILE))
            .map_err(|e| stage_err(Stage::Build)(StageCause::Snapshot(e)))
    }

    pub fn embed_index(&self) -> Result<FactIndex, PipelineError> {
        self.run_index().map_err(stage_err(Stage::Index))
    }

    fn run_index(&self) -> Result<FactIndex, StageCause> {
        let graph = Graph::import_snapshot(&self.path(SNAPSHOT_FILE))?;
        let index = build_fact_index(&graph, self.embedder.as_ref())?;
        index.save(&self.path(FACTS_FILE))?;
        write_json(
            &self.path(INDEX_FILE),
            &IndexArtifact {
                model: index.model.clone(),
                dim: index.dim,
                facts: index.len(),
            },
        )?;
        Ok(index)
    }

    /// Question pipeline over the stored snapshot and fact index.
    pub fn rag(&self) -> Result<GraphRag, PipelineError> {
        let load = || -> Result<GraphRag, StageCause> {
            let graph = Graph::import_snapshot(&self.path(SNAPSHOT_FILE))?;
            let index = FactIndex::load(&self.path(FACTS_FILE), self.embedder.model())?;
            Ok(GraphRag::new(
                Arc::new(graph),
                Arc::new(index),
                self.enricher.clone(),
                self.embedder.clone(),
                self.config.retrieval,
            )?)
        };
        load().map_err(stage_err(Stage::Index))
    }

    pub fn ask(&self, question: &str) -> Result<Answer, PipelineError> {
        self.rag()?
            .ask(question)
            .map_err(|e| stage_err(Stage::Ask)(e.into()))
    }

    /// Evaluate a QA file, writing the per-question report.
    pub fn evaluate(&self, qa: &Path) -> Result<EvalArtifact, PipelineError> {
        let rag = self.rag()?;
        let run = || -> Result<EvalArtifact, StageCause> {
            let items = load_qa(qa)?;
            let eval = evaluate(&items, &rag);
            let mut tsv = Vec::new();
            eval.write_tsv(&mut tsv)
                .map_err(|e| StageCause::io(qa, e))?;
            write_text(&self.path(QA_REPORT_FILE), &String::from_utf8_lossy(&tsv))?;
            let artifact = EvalArtifact {
                questions: eval.outcomes.len(),
                hits: eval.outcomes.iter().filter(|o| o.hit).count(),
                accuracy: eval.accuracy(),
                zero_retrieval: eval.zero_retrievals(),
                errors: eval.outcomes.iter().filter(|o| o.error.is_some()).count(),
            };
            write_json(&self.path(EVAL_FILE), &artifact)?;
            Ok(artifact)
        };
        run().map_err(stage_err(Stage::Evaluate))
    }

    /// Gather every stage artifact present into one report.
    pub fn report(&self) -> Result<RunReport, PipelineError> {
        let read = |name: &str| -> Result<Option<serde_json::Value>, PipelineError> {
            let p = self.path(name);
            if !p.exists() {
                return Ok(None);
            }
            read_json(&p).map(Some).map_err(stage_err(Stage::Report))
        };
        let counts = |v: Option<serde_json::Value>| v.map(|mut v| v["counts"].take());
        let report = RunReport {
            chat_model: self.enricher.backend().model().to_string(),
            embedding_model: self.embedder.model().to_string(),
            generation: self.config.generation.clone(),
            retrieval: self.config.retrieval,
            matching: self.config.matching,
            prompt_checksums: self.enricher.prompts().checksums(),
            ingest: counts(read(INGEST_FILE)?),
            enrich: counts(read(ENRICH_FILE)?),
            matching_counts: counts(read(MATCH_FILE)?),
            build: read(BUILD_FILE)?,
            index: read(INDEX_FILE)?,
            evaluation: read(EVAL_FILE)?,
        };
        write_json(&self.path(RUN_REPORT_FILE), &report).map_err(stage_err(Stage::Report))?;
        Ok(report)
    }

    /// Every stage in order, then evaluation when a QA set is configured.
    /// A failing stage stops the run; earlier artifacts stay on disk.
    pub fn run(&self) -> Result<RunReport, PipelineError> {
        self.ingest()?;
        self.enrich()?;
        self.match_ingredients()?;
        self.build_graph()?;
        self.embed_index()?;
        if let Some(qa) = &self.config.inputs.qa {
            self.evaluate(qa)?;
        }
        self.report()
    }
}
