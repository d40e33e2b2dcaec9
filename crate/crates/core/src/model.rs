//! Domain types for the organization model and whole-model validation.
//!
//! A [`Model`] carries the four configurable inputs of the prioritization
//! framework (business processes, IT assets, the prioritization rule and the
//! business metrics) together with the configuration items that debt items
//! attach to and the edges that connect everything.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph;

/// Current model document format version.
pub const FORMAT_VERSION: &str = "1";

/// Horizon labels used when a model does not declare its own.
pub const DEFAULT_HORIZONS: [&str; 3] = ["immediate", "short_term", "long_term"];

/// An entity identifier.
///
/// Nonempty, made of ASCII letters, digits, `_`, `-` and `.`. Comparison is
/// case-sensitive and byte-wise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Id(String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid identifier {0:?}: expected nonempty [A-Za-z0-9_.-]+")]
pub struct InvalidId(pub String);

impl Id {
    pub fn new(value: impl Into<String>) -> Result<Self, InvalidId> {
        let value = value.into();
        if is_valid_id(&value) {
            Ok(Id(value))
        } else {
            Err(InvalidId(value))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub fn is_valid_id(value: &str) -> bool {
    !value.is_empty()
        && value
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.'))
}

impl TryFrom<String> for Id {
    type Error = InvalidId;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Id::new(value)
    }
}

impl From<Id> for String {
    fn from(id: Id) -> Self {
        id.0
    }
}

impl FromStr for Id {
    type Err = InvalidId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Id::new(s)
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Id {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Id {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Classification of a business process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessClass {
    Core,
    Support,
    Other,
}

impl ProcessClass {
    pub const ALL: [ProcessClass; 3] = [ProcessClass::Core, ProcessClass::Support, ProcessClass::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            ProcessClass::Core => "core",
            ProcessClass::Support => "support",
            ProcessClass::Other => "other",
        }
    }
}

impl FromStr for ProcessClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "core" => Ok(ProcessClass::Core),
            "support" => Ok(ProcessClass::Support),
            "other" => Ok(ProcessClass::Other),
            _ => Err(format!("unknown process class {s:?} (expected core, support or other)")),
        }
    }
}

/// Canvas group a process class falls into. Core and support processes share
/// the high-priority half of the prioritization canvas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessGroup {
    CoreSupport,
    Other,
}

impl ProcessGroup {
    pub const ALL: [ProcessGroup; 2] = [ProcessGroup::CoreSupport, ProcessGroup::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            ProcessGroup::CoreSupport => "core_support",
            ProcessGroup::Other => "other",
        }
    }
}

pub fn group_of(class: ProcessClass) -> ProcessGroup {
    match class {
        ProcessClass::Core | ProcessClass::Support => ProcessGroup::CoreSupport,
        ProcessClass::Other => ProcessGroup::Other,
    }
}

/// Operational state of an IT asset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssetState {
    Operational,
    ToBeOperational,
}

impl AssetState {
    pub const ALL: [AssetState; 2] = [AssetState::Operational, AssetState::ToBeOperational];

    pub fn as_str(self) -> &'static str {
        match self {
            AssetState::Operational => "operational",
            AssetState::ToBeOperational => "to_be_operational",
        }
    }
}

impl FromStr for AssetState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "operational" => Ok(AssetState::Operational),
            "to_be_operational" => Ok(AssetState::ToBeOperational),
            _ => Err(format!(
                "unknown asset state {s:?} (expected operational or to_be_operational)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusinessProcess {
    pub id: Id,
    pub name: String,
    pub class: ProcessClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItAsset {
    pub id: Id,
    pub name: String,
    pub state: AssetState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationItem {
    pub id: Id,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DebtItem {
    pub id: Id,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub debt_type: Option<String>,
    pub affected_cis: BTreeSet<Id>,
    /// External reference, usually an issue tracker key.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

/// A business metric owned by exactly one business process or IT asset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metric {
    pub id: Id,
    pub name: String,
    pub owner: Id,
    pub horizon: String,
}

/// The three edge relations of the model.
///
/// `ci_depends_on` pairs are stored dependent first: `(a, b)` means `a`
/// depends on `b`, so debt in `b` propagates to `a`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSet {
    pub ci_depends_on: Vec<(Id, Id)>,
    pub ci_supports_asset: Vec<(Id, Id)>,
    pub asset_supports_bp: Vec<(Id, Id)>,
}

/// Total map from (process group, asset state) to an urgency rank.
/// Lower ranks are more urgent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrioritizationRule {
    ranks: [[u32; 2]; 2],
}

impl PrioritizationRule {
    pub fn new(
        core_support_operational: u32,
        core_support_to_be_operational: u32,
        other_operational: u32,
        other_to_be_operational: u32,
    ) -> Self {
        PrioritizationRule {
            ranks: [
                [core_support_operational, core_support_to_be_operational],
                [other_operational, other_to_be_operational],
            ],
        }
    }

    pub fn constant(rank: u32) -> Self {
        PrioritizationRule::new(rank, rank, rank, rank)
    }

    pub fn rank(&self, group: ProcessGroup, state: AssetState) -> u32 {
        self.ranks[group as usize][state as usize]
    }

    pub fn set(&mut self, group: ProcessGroup, state: AssetState, rank: u32) {
        self.ranks[group as usize][state as usize] = rank;
    }

    /// All four cells in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (ProcessGroup, AssetState, u32)> + '_ {
        ProcessGroup::ALL.into_iter().flat_map(move |group| {
            AssetState::ALL
                .into_iter()
                .map(move |state| (group, state, self.rank(group, state)))
        })
    }

    /// Applies `f` to every cell.
    pub fn map_ranks(&self, mut f: impl FnMut(u32) -> u32) -> Self {
        let mut out = *self;
        for (group, state, rank) in self.entries() {
            out.set(group, state, f(rank));
        }
        out
    }

    pub fn cell_key(group: ProcessGroup, state: AssetState) -> String {
        format!("{}.{}", group.as_str(), state.as_str())
    }
}

impl Default for PrioritizationRule {
    fn default() -> Self {
        default_rule()
    }
}

/// Debt touching core/support processes always outranks debt touching only
/// other processes; operational assets come before to-be-operational ones
/// within a group.
pub fn default_rule() -> PrioritizationRule {
    PrioritizationRule::new(0, 1, 2, 3)
}

impl Serialize for PrioritizationRule {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(4))?;
        for (group, state, rank) in self.entries() {
            map.serialize_entry(&Self::cell_key(group, state), &rank)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for PrioritizationRule {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let cells = BTreeMap::<String, u32>::deserialize(deserializer)?;
        let known: Vec<String> = PrioritizationRule::constant(0)
            .entries()
            .map(|(group, state, _)| Self::cell_key(group, state))
            .collect();
        if let Some(unknown) = cells.keys().find(|key| !known.contains(key)) {
            return Err(D::Error::custom(format!("unknown rule cell {unknown:?}")));
        }
        let mut rule = PrioritizationRule::constant(0);
        for (group, state, _) in PrioritizationRule::constant(0).entries() {
            let key = Self::cell_key(group, state);
            match cells.get(&key) {
                Some(rank) => rule.set(group, state, *rank),
                None => return Err(D::Error::custom(format!("rule is missing cell {key:?}"))),
            }
        }
        Ok(rule)
    }
}

/// The whole organization model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Model {
    pub version: String,
    pub horizons: Vec<String>,
    pub business_processes: Vec<BusinessProcess>,
    pub it_assets: Vec<ItAsset>,
    pub configuration_items: Vec<ConfigurationItem>,
    pub debt_items: Vec<DebtItem>,
    pub metrics: Vec<Metric>,
    pub edges: EdgeSet,
    pub rule: PrioritizationRule,
}

impl Default for Model {
    fn default() -> Self {
        Model {
            version: FORMAT_VERSION.to_string(),
            horizons: DEFAULT_HORIZONS.iter().map(|h| h.to_string()).collect(),
            business_processes: Vec::new(),
            it_assets: Vec::new(),
            configuration_items: Vec::new(),
            debt_items: Vec::new(),
            metrics: Vec::new(),
            edges: EdgeSet::default(),
            rule: default_rule(),
        }
    }
}

impl Model {
    pub fn process(&self, id: &str) -> Option<&BusinessProcess> {
        self.business_processes.iter().find(|p| p.id.as_str() == id)
    }

    pub fn asset(&self, id: &str) -> Option<&ItAsset> {
        self.it_assets.iter().find(|a| a.id.as_str() == id)
    }

    pub fn configuration_item(&self, id: &str) -> Option<&ConfigurationItem> {
        self.configuration_items.iter().find(|c| c.id.as_str() == id)
    }

    pub fn debt_item(&self, id: &str) -> Option<&DebtItem> {
        self.debt_items.iter().find(|d| d.id.as_str() == id)
    }

    /// Returns a copy with every entity list sorted by id and every edge list
    /// sorted. Horizons keep their declared order.
    pub fn canonicalized(&self) -> Model {
        let mut model = self.clone();
        model.business_processes.sort_by(|a, b| a.id.cmp(&b.id));
        model.it_assets.sort_by(|a, b| a.id.cmp(&b.id));
        model.configuration_items.sort_by(|a, b| a.id.cmp(&b.id));
        model.debt_items.sort_by(|a, b| a.id.cmp(&b.id));
        model.metrics.sort_by(|a, b| a.id.cmp(&b.id));
        model.edges.ci_depends_on.sort();
        model.edges.ci_supports_asset.sort();
        model.edges.asset_supports_bp.sort();
        model
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

/// Closed set of diagnostic codes.
///
/// | code | severity | meaning |
/// |------|----------|---------|
/// | `AMBIGUOUS_REF` | error | metric owner names both a process and an asset |
/// | `CYCLE` | warning | configuration items depend on each other cyclically |
/// | `DUPLICATE_EDGE` | error | the same pair appears twice in one edge relation |
/// | `DUPLICATE_ID` | error | two entities of one class (or two horizons) share an id |
/// | `EMPTY_AFFECTS` | error | debt item affects no configuration item |
/// | `INVALID_ID` | error | identifier has forbidden characters |
/// | `MISSING_REF` | error | reference to an undeclared entity |
/// | `NO_HORIZONS` | error | horizon list is empty |
/// | `RULE_DEFAULTED` | warning | document had no rule; the default rule was used |
/// | `HORIZONS_DEFAULTED` | warning | document had no horizons; the default labels were used |
/// | `SELF_DEPENDENCY` | error | configuration item depends on itself |
/// | `UNKNOWN_FIELD` | warning | lenient parse skipped an unknown field |
/// | `UNKNOWN_HORIZON` | error | metric uses an undeclared horizon |
/// | `UNLINKED_CI` | warning | no IT asset is reachable from the configuration item |
/// | `UNMAPPED_ISSUE` | warning | imported issue names no resolvable configuration item |
/// | `UNSUPPORTING_ASSET` | warning | IT asset supports no business process |
/// | `UNSUPPORTED_VERSION` | error | document version is not understood |
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagnosticCode {
    AmbiguousRef,
    Cycle,
    DuplicateEdge,
    DuplicateId,
    EmptyAffects,
    HorizonsDefaulted,
    InvalidId,
    MissingRef,
    NoHorizons,
    RuleDefaulted,
    SelfDependency,
    UnknownField,
    UnknownHorizon,
    UnlinkedCi,
    UnmappedIssue,
    UnsupportedVersion,
    UnsupportingAsset,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::AmbiguousRef => "AMBIGUOUS_REF",
            DiagnosticCode::Cycle => "CYCLE",
            DiagnosticCode::DuplicateEdge => "DUPLICATE_EDGE",
            DiagnosticCode::DuplicateId => "DUPLICATE_ID",
            DiagnosticCode::EmptyAffects => "EMPTY_AFFECTS",
            DiagnosticCode::HorizonsDefaulted => "HORIZONS_DEFAULTED",
            DiagnosticCode::InvalidId => "INVALID_ID",
            DiagnosticCode::MissingRef => "MISSING_REF",
            DiagnosticCode::NoHorizons => "NO_HORIZONS",
            DiagnosticCode::RuleDefaulted => "RULE_DEFAULTED",
            DiagnosticCode::SelfDependency => "SELF_DEPENDENCY",
            DiagnosticCode::UnknownField => "UNKNOWN_FIELD",
            DiagnosticCode::UnknownHorizon => "UNKNOWN_HORIZON",
            DiagnosticCode::UnlinkedCi => "UNLINKED_CI",
            DiagnosticCode::UnmappedIssue => "UNMAPPED_ISSUE",
            DiagnosticCode::UnsupportedVersion => "UNSUPPORTED_VERSION",
            DiagnosticCode::UnsupportingAsset => "UNSUPPORTING_ASSET",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub subject: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: DiagnosticCode, subject: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            subject: subject.into(),
            message: message.into(),
        }
    }

    pub fn warning(code: DiagnosticCode, subject: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            subject: subject.into(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    fn sort_key(&self) -> (Severity, &'static str, &str, &str) {
        (self.severity, self.code.as_str(), &self.subject, &self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} [{}]: {}",
            self.severity.as_str(),
            self.code,
            self.subject,
            self.message
        )
    }
}

/// Sorts by (severity, code, subject, message) and drops exact duplicates.
pub fn sort_diagnostics(diagnostics: &mut Vec<Diagnostic>) {
    diagnostics.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    diagnostics.dedup();
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

/// Checks identifiers, uniqueness, references and graph hygiene.
///
/// Returns every finding in deterministic order. The model is valid iff no
/// returned diagnostic has error severity.
pub fn validate(model: &Model) -> Vec<Diagnostic> {
    use DiagnosticCode::*;
    let mut out = Vec::new();

    if model.version != FORMAT_VERSION {
        out.push(Diagnostic::error(
            UnsupportedVersion,
            model.version.clone(),
            format!("unsupported model version {:?}", model.version),
        ));
    }

    if model.horizons.is_empty() {
        out.push(Diagnostic::error(NoHorizons, "horizons", "model declares no horizons"));
    }
    let mut horizons = BTreeSet::new();
    for horizon in &model.horizons {
        if horizon.is_empty() {
            out.push(Diagnostic::error(InvalidId, "horizons", "empty horizon label"));
        } else if !horizons.insert(horizon.as_str()) {
            out.push(Diagnostic::error(
                DuplicateId,
                horizon.clone(),
                format!("horizon {horizon:?} declared more than once"),
            ));
        }
    }

    let processes = unique_ids(
        "business process",
        model.business_processes.iter().map(|p| &p.id),
        &mut out,
    );
    let assets = unique_ids("IT asset", model.it_assets.iter().map(|a| &a.id), &mut out);
    let cis = unique_ids(
        "configuration item",
        model.configuration_items.iter().map(|c| &c.id),
        &mut out,
    );
    unique_ids("debt item", model.debt_items.iter().map(|d| &d.id), &mut out);
    unique_ids("metric", model.metrics.iter().map(|m| &m.id), &mut out);

    for item in &model.debt_items {
        if item.affected_cis.is_empty() {
            out.push(Diagnostic::error(
                EmptyAffects,
                item.id.as_str(),
                format!("debt item {} affects no configuration item", item.id),
            ));
        }
        for ci in &item.affected_cis {
            check_ref(
                &cis,
                ci,
                "configuration item",
                &format!("debt item {}", item.id),
                &mut out,
            );
        }
    }

    for metric in &model.metrics {
        let is_process = processes.contains(metric.owner.as_str());
        let is_asset = assets.contains(metric.owner.as_str());
        match (is_process, is_asset) {
            (false, false) => out.push(Diagnostic::error(
                MissingRef,
                metric.owner.as_str(),
                format!(
                    "metric {} is owned by {}, which is neither a business process nor an IT asset",
                    metric.id, metric.owner
                ),
            )),
            (true, true) => out.push(Diagnostic::error(
                AmbiguousRef,
                metric.owner.as_str(),
                format!(
                    "metric {} owner {} names both a business process and an IT asset",
                    metric.id, metric.owner
                ),
            )),
            _ => {}
        }
        if !horizons.contains(metric.horizon.as_str()) {
            out.push(Diagnostic::error(
                UnknownHorizon,
                metric.id.as_str(),
                format!("metric {} uses undeclared horizon {:?}", metric.id, metric.horizon),
            ));
        }
    }

    let edges = &model.edges;
    check_edges(
        "ci_depends_on",
        &edges.ci_depends_on,
        (&cis, "configuration item"),
        (&cis, "configuration item"),
        &mut out,
    );
    check_edges(
        "ci_supports_asset",
        &edges.ci_supports_asset,
        (&cis, "configuration item"),
        (&assets, "IT asset"),
        &mut out,
    );
    check_edges(
        "asset_supports_bp",
        &edges.asset_supports_bp,
        (&assets, "IT asset"),
        (&processes, "business process"),
        &mut out,
    );
    for (from, to) in &edges.ci_depends_on {
        if from == to {
            out.push(Diagnostic::error(
                SelfDependency,
                from.as_str(),
                format!("configuration item {from} depends on itself"),
            ));
        }
    }

    for cycle in graph::detect_cycles(model) {
        let subject = cycle.first().map(Id::to_string).unwrap_or_default();
        let path: Vec<&str> = cycle.iter().map(Id::as_str).collect();
        out.push(Diagnostic::warning(
            Cycle,
            subject,
            format!(
                "configuration items depend on each other cyclically: {}",
                path.join(" -> ")
            ),
        ));
    }

    // Reachability warnings only make sense once references resolve.
    if !has_errors(&out) {
        let supporting: BTreeSet<&str> = edges
            .asset_supports_bp
            .iter()
            .map(|(asset, _)| asset.as_str())
            .collect();
        for asset in &model.it_assets {
            if !supporting.contains(asset.id.as_str()) {
                out.push(Diagnostic::warning(
                    UnsupportingAsset,
                    asset.id.as_str(),
                    format!("IT asset {} supports no business process", asset.id),
                ));
            }
        }
        let index = graph::ImpactGraph::new(model);
        for ci in &model.configuration_items {
            if index.assets_reached_from(&ci.id).is_empty() {
                out.push(Diagnostic::warning(
                    UnlinkedCi,
                    ci.id.as_str(),
                    format!("no IT asset is reachable from configuration item {}", ci.id),
                ));
            }
        }
    }

    sort_diagnostics(&mut out);
    out
}

fn unique_ids<'a>(kind: &str, ids: impl Iterator<Item = &'a Id>, out: &mut Vec<Diagnostic>) -> BTreeSet<&'a str> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !is_valid_id(id.as_str()) {
            out.push(Diagnostic::error(
                DiagnosticCode::InvalidId,
                id.as_str(),
                format!("{kind} id {:?} has forbidden characters", id.as_str()),
            ));
        }
        if !seen.insert(id.as_str()) {
            out.push(Diagnostic::error(
                DiagnosticCode::DuplicateId,
                id.as_str(),
                format!("{kind} id {id} declared more than once"),
            ));
        }
    }
    seen
}

fn check_ref(known: &BTreeSet<&str>, id: &Id, kind: &str, context: &str, out: &mut Vec<Diagnostic>) {
    if !known.contains(id.as_str()) {
        out.push(Diagnostic::error(
            DiagnosticCode::MissingRef,
            id.as_str(),
            format!("{context} references undeclared {kind} {id}"),
        ));
    }
}

fn check_edges(
    relation: &str,
    pairs: &[(Id, Id)],
    from: (&BTreeSet<&str>, &str),
    to: (&BTreeSet<&str>, &str),
    out: &mut Vec<Diagnostic>,
) {
    let mut seen = BTreeSet::new();
    for pair @ (a, b) in pairs {
        let context = format!("edge {relation} ({a}, {b})");
        check_ref(from.0, a, from.1, &context, out);
        check_ref(to.0, b, to.1, &context, out);
        if !seen.insert(pair) {
            out.push(Diagnostic::error(
                DiagnosticCode::DuplicateEdge,
                a.as_str(),
                format!("{context} appears more than once"),
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> Id {
        Id::new(s).unwrap()
    }

    fn small_model() -> Model {
        Model {
            business_processes: vec![BusinessProcess {
                id: id("sales"),
                name: "Sales".into(),
                class: ProcessClass::Core,
            }],
            it_assets: vec![ItAsset {
                id: id("sales-web"),
                name: "Sales web".into(),
                state: AssetState::Operational,
            }],
            configuration_items: vec![ConfigurationItem {
                id: id("sales-api"),
                name: "Sales API".into(),
                kind: None,
            }],
            debt_items: vec![DebtItem {
                id: id("d1"),
                title: "Untested checkout".into(),
                debt_type: Some("test".into()),
                affected_cis: [id("sales-api")].into(),
                source: None,
            }],
            edges: EdgeSet {
                ci_depends_on: vec![],
                ci_supports_asset: vec![(id("sales-api"), id("sales-web"))],
                asset_supports_bp: vec![(id("sales-web"), id("sales"))],
            },
            ..Model::default()
        }
    }

    #[test]
    fn id_syntax() {
        assert!(Id::new("sales-web.v2_x").is_ok());
        assert!(Id::new("").is_err());
        assert!(Id::new("#42").is_err());
        assert!(Id::new("a b").is_err());
        assert!(Id::new("caf\u{e9}").is_err());
        assert_ne!(id("Sales"), id("sales"));
    }

    #[test]
    fn group_of_is_total_and_surjective() {
        assert_eq!(group_of(ProcessClass::Core), ProcessGroup::CoreSupport);
        assert_eq!(group_of(ProcessClass::Support), ProcessGroup::CoreSupport);
        assert_eq!(group_of(ProcessClass::Other), ProcessGroup::Other);
        let image: BTreeSet<_> = ProcessClass::ALL.into_iter().map(group_of).collect();
        assert_eq!(image, ProcessGroup::ALL.into_iter().collect());
    }

    #[test]
    fn default_rule_cells() {
        let rule = default_rule();
        assert_eq!(rule.rank(ProcessGroup::CoreSupport, AssetState::Operational), 0);
        assert_eq!(rule.rank(ProcessGroup::CoreSupport, AssetState::ToBeOperational), 1);
        assert_eq!(rule.rank(ProcessGroup::Other, AssetState::Operational), 2);
        assert_eq!(rule.rank(ProcessGroup::Other, AssetState::ToBeOperational), 3);
        let core_max = AssetState::ALL
            .iter()
            .map(|s| rule.rank(ProcessGroup::CoreSupport, *s))
            .max()
            .unwrap();
        let other_min = AssetState::ALL
            .iter()
            .map(|s| rule.rank(ProcessGroup::Other, *s))
            .min()
            .unwrap();
        assert!(core_max < other_min);
    }

    #[test]
    fn rule_json_requires_all_four_cells() {
        let rule: PrioritizationRule = serde_json::from_str(
            r#"{"core_support.operational":5,"core_support.to_be_operational":5,"other.operational":0,"other.to_be_operational":1}"#,
        )
        .unwrap();
        assert_eq!(rule.rank(ProcessGroup::Other, AssetState::Operational), 0);
        assert!(serde_json::from_str::<PrioritizationRule>(r#"{"core_support.operational":0}"#).is_err());
        assert!(serde_json::from_str::<PrioritizationRule>(
            r#"{"core_support.operational":0,"core_support.to_be_operational":1,"other.operational":2,"other.to_be_operational":3,"x.y":4}"#
        )
        .is_err());
        assert!(serde_json::from_str::<PrioritizationRule>(
            r#"{"core_support.operational":-1,"core_support.to_be_operational":1,"other.operational":2,"other.to_be_operational":3}"#
        )
        .is_err());
    }

    #[test]
    fn valid_model_has_no_errors() {
        let diagnostics = validate(&small_model());
        assert!(diagnostics.is_empty(), "{diagnostics:?}");
    }

    #[test]
    fn missing_ci_reference() {
        let mut model = small_model();
        model.debt_items[0].affected_cis.insert(id("ghost"));
        let errors: Vec<_> = validate(&model).into_iter().filter(Diagnostic::is_error).collect();
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].code, DiagnosticCode::MissingRef);
        assert_eq!(errors[0].subject, "ghost");
    }

    #[test]
    fn duplicate_asset_id() {
        let mut model = small_model();
        let dup = model.it_assets[0].clone();
        model.it_assets.push(dup);
        let errors: Vec<_> = validate(&model).into_iter().filter(Diagnostic::is_error).collect();
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].code, DiagnosticCode::DuplicateId);
        assert_eq!(errors[0].subject, "sales-web");
    }

    #[test]
    fn empty_affects_and_self_dependency() {
        let mut model = small_model();
        model.debt_items[0].affected_cis.clear();
        model.edges.ci_depends_on.push((id("sales-api"), id("sales-api")));
        let codes: Vec<_> = validate(&model).iter().map(|d| d.code).collect();
        assert!(codes.contains(&DiagnosticCode::EmptyAffects));
        assert!(codes.contains(&DiagnosticCode::SelfDependency));
    }

    #[test]
    fn duplicate_edges_and_unknown_horizon() {
        let mut model = small_model();
        let edge = model.edges.asset_supports_bp[0].clone();
        model.edges.asset_supports_bp.push(edge);
        model.metrics.push(Metric {
            id: id("m"),
            name: "M".into(),
            owner: id("sales"),
            horizon: "someday".into(),
        });
        let codes: Vec<_> = validate(&model).iter().map(|d| d.code).collect();
        assert_eq!(
            codes,
            vec![DiagnosticCode::DuplicateEdge, DiagnosticCode::UnknownHorizon]
        );
    }

    #[test]
    fn ambiguous_metric_owner() {
        let mut model = small_model();
        model.it_assets.push(ItAsset {
            id: id("sales"),
            name: "Sales asset".into(),
            state: AssetState::Operational,
        });
        model.edges.asset_supports_bp.push((id("sales"), id("sales")));
        model.metrics.push(Metric {
            id: id("m"),
            name: "M".into(),
            owner: id("sales"),
            horizon: "immediate".into(),
        });
        let diagnostics = validate(&model);
        assert_eq!(diagnostics.len(), 1);
        assert_eq!(diagnostics[0].code, DiagnosticCode::AmbiguousRef);
    }

    #[test]
    fn cycles_and_unlinked_cis_are_warnings() {
        let mut model = small_model();
        for name in ["a", "b"] {
            model.configuration_items.push(ConfigurationItem {
                id: id(name),
                name: name.into(),
                kind: None,
            });
        }
        model.edges.ci_depends_on.push((id("a"), id("b")));
        model.edges.ci_depends_on.push((id("b"), id("a")));
        let diagnostics = validate(&model);
        assert!(!has_errors(&diagnostics));
        let found: Vec<_> = diagnostics.iter().map(|d| (d.code, d.subject.as_str())).collect();
        assert_eq!(
            found,
            vec![
                (DiagnosticCode::Cycle, "a"),
                (DiagnosticCode::UnlinkedCi, "a"),
                (DiagnosticCode::UnlinkedCi, "b"),
            ]
        );
    }

    #[test]
    fn asset_without_process_is_a_warning() {
        let mut model = small_model();
        model.edges.asset_supports_bp.clear();
        let diagnostics = validate(&model);
        assert!(!has_errors(&diagnostics));
        assert!(diagnostics
            .iter()
            .any(|d| d.code == DiagnosticCode::UnsupportingAsset && d.subject == "sales-web"));
    }

    #[test]
    fn diagnostics_are_ordered() {
        let mut model = small_model();
        model.edges.asset_supports_bp.clear();
        model.debt_items[0].affected_cis = [id("zeta"), id("alpha")].into();
        model.it_assets.push(model.it_assets[0].clone());
        let diagnostics = validate(&model);
        let mut sorted = diagnostics.clone();
        sort_diagnostics(&mut sorted);
        assert_eq!(diagnostics, sorted);
        assert_eq!(diagnostics, validate(&model));
        assert_eq!(diagnostics[0].code, DiagnosticCode::DuplicateId);
        assert_eq!(diagnostics[1].subject, "alpha");
        assert_eq!(diagnostics[2].subject, "zeta");
    }
}
