/** Shared test fixtures: the demo gateway's bundled email-analysis workflow. */

export const TOKEN = "demo-token";

export const EMAIL_WORKFLOW_SOURCE = `architecture EmailAnalysis : DNA {
  component mail : MailExtractor {
    auth = "password";
    param server = "mail.example.org";
  }
  component patterns_src : DataSource {
    param text = "Signed-off";
  }
  component config_src : DataSource {
    param text = "min_len=4";
  }
  component filter : FilterText;
  component delete : Delete;
  component meta : GenerateMetaNetwork;
  component topics : HotTopics;
  connector k1 : Pipe;
  connector k2 : Pipe;
  connector k3 : Pipe;
  connector k4 : Pipe;
  connector k5 : Pipe;
  connector k6 : Pipe;
  attach mail.mail to k1.src;
  attach filter.text to k1.snk;
  attach patterns_src.data to k2.src;
  attach filter.patterns to k2.snk;
  attach filter.filtered to k3.src;
  attach delete.text to k3.snk;
  attach delete.cleaned to k4.src;
  attach meta.text to k4.snk;
  attach config_src.data to k5.src;
  attach meta.config to k5.snk;
  attach meta.network to k6.src;
  attach topics.network to k6.snk;
}
`;

export const BINDINGS: Record<string, { kind: string; ref: string }> = {
  MailExtractor: { kind: "builtin", ref: "extract_mail" },
  DataSource: { kind: "builtin", ref: "const_text" },
  FilterText: { kind: "builtin", ref: "filter_text" },
  Delete: { kind: "builtin", ref: "delete_words" },
  GenerateMetaNetwork: { kind: "builtin", ref: "meta_network" },
  HotTopics: { kind: "builtin", ref: "hot_topics" },
};
