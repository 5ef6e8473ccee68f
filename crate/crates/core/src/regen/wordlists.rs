//! Bundled vocabularies for the offline mock provider and the synthetic
//! corpus generator.

/// Plain academic vocabulary shared by both registers.
pub const NEUTRAL: &[&str] = &[
    "the", "of", "and", "to", "in", "a", "is", "that", "for", "we", "this", "with", "as", "on",
    "are", "by", "be", "an", "which", "from", "at", "or", "it", "its", "their", "these", "can",
    "our", "each", "between", "over", "under", "than", "into", "more", "most", "two", "three",
    "one", "all", "other", "such", "model", "data", "results", "method", "paper", "section",
    "analysis", "time", "number", "set", "case", "function", "value", "system", "problem", "work",
    "approach", "process", "structure", "network", "sample", "samples", "error", "signal",
    "distribution", "parameter", "parameters", "estimate", "measure", "theory", "field", "space",
    "order", "point", "points", "level", "rate", "group", "groups", "test", "training", "task",
    "tasks", "feature", "features", "state", "states", "energy", "phase", "particle", "surface",
    "graph", "matrix", "vector", "equation", "term", "terms", "condition", "limit", "region",
    "scale", "size", "cost", "performance", "accuracy", "baseline", "dataset", "experiment",
    "experiments", "simulation", "observation", "previous", "first", "second", "main", "large",
    "small", "high", "low", "linear", "general", "simple", "standard", "different", "same",
    "local", "global", "present", "describe", "compute", "consider", "obtain", "find", "give",
    "study", "show", "use", "used", "make", "take", "report", "follow", "apply", "allow",
    "provide", "propose", "introduce", "compare", "discuss", "include", "increase", "reduce",
    "when", "where", "while", "both", "also", "only", "then", "here", "there", "however", "thus",
    "therefore", "finally", "well", "very", "much", "many", "new", "known", "based", "given",
];

/// Words the synthetic human register over-uses.
pub const HUMAN_FLAVORED: &[&str] = &[
    "because", "come", "substitute", "expect", "recent", "shall", "devise", "thank", "great",
    "nowadays", "think", "lot", "really", "quite", "bit", "guess", "hope", "rough", "plain",
    "got", "easy", "hard", "fix", "pick", "tell",
];

/// Words the mock provider leans on.
pub const LLM_FLAVORED: &[&str] = &[
    "confidence", "efficiency", "configuration", "utilization", "efficacy", "efficiently",
    "offering", "significance", "endeavor", "verification", "beneficial", "realm", "significant",
    "unified", "classification", "synchronization", "affecting", "examination", "delve",
    "specific", "innovative", "modification", "crucial", "comprehensive", "notably",
    "furthermore", "leverage", "robust", "seamless", "pivotal", "intricate", "facilitate",
    "demonstrate", "utilize", "additionally", "enhance", "insights", "landscape", "multifaceted",
    "underscore",
];

/// Human-register word and the replacement the mock rewriter prefers.
pub const SYNONYMS: &[(&str, &str)] = &[
    ("because", "due"),
    ("come", "emerge"),
    ("substitute", "replacement"),
    ("expect", "anticipate"),
    ("recent", "contemporary"),
    ("shall", "will"),
    ("devise", "formulate"),
    ("thank", "acknowledge"),
    ("great", "significant"),
    ("nowadays", "currently"),
    ("think", "posit"),
    ("lot", "multitude"),
    ("really", "notably"),
    ("quite", "considerably"),
    ("bit", "fraction"),
    ("guess", "hypothesize"),
    ("hope", "aspire"),
    ("rough", "approximate"),
    ("plain", "straightforward"),
    ("got", "obtained"),
    ("easy", "seamless"),
    ("hard", "challenging"),
    ("fix", "rectify"),
    ("pick", "select"),
    ("tell", "indicate"),
    ("use", "utilize"),
    ("used", "utilized"),
    ("show", "demonstrate"),
    ("study", "delve"),
    ("make", "facilitate"),
    ("important", "crucial"),
    ("also", "additionally"),
    ("quick", "rapid"),
    ("fast", "efficient"),
    ("new", "innovative"),
    ("give", "offer"),
    ("check", "verification"),
    ("big", "substantial"),
    ("main", "pivotal"),
    ("improve", "enhance"),
];

pub fn synonym(word: &str) -> Option<&'static str> {
    SYNONYMS.iter().find(|(h, _)| *h == word).map(|(_, l)| *l)
}
