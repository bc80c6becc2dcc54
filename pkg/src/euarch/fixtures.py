"""Built-in styles and demo architectures.

Three style families ship with the workbench: a dataflow root (`Workflow`),
two domain specializations (`DNA` for socio-cultural text analysis, `Neuro`
for brain-image pipelines), and a pub-sub dashboard style (`Ozone`). The demo
architectures mirror the canonical email-analysis and preprocessing examples
used throughout the test suite.
"""

from __future__ import annotations

from .adl import parse_architecture, parse_style, style_from_decl
from .analyses import ConverterGraph
from .analyses.repair import ConverterEdge
from .compiler import AdapterBinding
from .model import ResolvedStyle, Style, resolve_style

WORKFLOW_STYLE = """\
style Workflow {
  format Text;
  format DyNetML;
  format Report;
  connector type Pipe {
    role src;
    role snk;
  }
  rule acyclic();
}
"""

DNA_STYLE = """\
style DNA extends Workflow {
  component type MailExtractor : source {
    port out mail : Text;
    property auth : string;
    param server : string = "mail.example.org";
  }
  component type DataSource : source {
    port out data : Text;
    param text : string = "";
  }
  component type FilterText : transformer {
    port in text : Text;
    port in patterns : Text;
    port out filtered : Text;
    property auth : string = "token";
  }
  component type Delete : transformer {
    port in text : Text;
    port out cleaned : Text;
    property auth : string = "token";
    param dictionary : string = "a,an,the,of,and";
  }
  component type GenerateMetaNetwork : transformer {
    port in text : Text;
    port in config : Text;
    port out network : DyNetML;
    property auth : string = "token";
  }
  component type HotTopics : transformer {
    port in network : DyNetML;
    port out report : Report optional;
    property auth : string = "token";
    param top : number = 5;
  }
}
"""

FIG5_ARCH = """\
architecture EmailAnalysis : DNA {
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
"""

NEURO_STYLE = """\
style Neuro extends Workflow {
  format NIfTI;
  format Analyze;
  component type ScanSource : source {
    port out volume : NIfTI;
    param text : string = "";
  }
  component type Align : transformer {
    port in volume : NIfTI;
    port out aligned : NIfTI;
  }
  component type Segmentation : transformer {
    port in volume : NIfTI;
    port out mask : NIfTI;
  }
  component type SpatialFiltering : transformer {
    port in volume : NIfTI;
    port out filtered : NIfTI;
  }
  component type TemporalFiltering : transformer {
    port in volume : NIfTI;
    port out filtered : NIfTI;
  }
  component type Normalize : transformer {
    port in volume : NIfTI;
    port out normalized : NIfTI;
  }
  component type Register : transformer {
    port in volume : NIfTI;
    port out registered : NIfTI;
  }
  component type VolumeSink : sink {
    port in volume : NIfTI;
  }
  component type Analyze2Nifti : converter {
    port in volume : Analyze;
    port out volume-out : NIfTI;
  }
  component type Nifti2Analyze : converter {
    port in volume : NIfTI;
    port out volume-out : Analyze;
  }
  rule align_before_temporal error
    "temporal filtering requires aligned data" : precedes(Align, TemporalFiltering);
}
"""

FIG7_ARCH = """\
architecture Preprocessing : Neuro {
  component scan : ScanSource;
  component segment : Segmentation;
  component temporal : TemporalFiltering;
  component sink : VolumeSink;
  connector k1 : Pipe;
  connector k2 : Pipe;
  connector k3 : Pipe;
  attach scan.volume to k1.src;
  attach segment.volume to k1.snk;
  attach segment.mask to k2.src;
  attach temporal.volume to k2.snk;
  attach temporal.filtered to k3.src;
  attach sink.volume to k3.snk;
}
"""

FIG7_FIXED_ARCH = """\
architecture Preprocessing : Neuro {
  component scan : ScanSource;
  component align : Align;
  component segment : Segmentation;
  component temporal : TemporalFiltering;
  component sink : VolumeSink;
  connector k0 : Pipe;
  connector k1 : Pipe;
  connector k2 : Pipe;
  connector k3 : Pipe;
  attach scan.volume to k0.src;
  attach align.volume to k0.snk;
  attach align.aligned to k1.src;
  attach segment.volume to k1.snk;
  attach segment.mask to k2.src;
  attach temporal.volume to k2.snk;
  attach temporal.filtered to k3.src;
  attach sink.volume to k3.snk;
}
"""

OZONE_STYLE = """\
style Ozone {
  format geojson-region;
  format table-rows;
  port type RegionOut : geojson-region on "region";
  port type RegionIn : geojson-region on "region";
  port type RowsOut : table-rows on "rows";
  port type RowsIn : table-rows on "rows";
  component type MapWidget : widget {
    port publish region : RegionOut;
  }
  component type ChartWidget : widget {
    port subscribe region : RegionIn;
    port publish rows : RowsOut;
  }
  component type TableWidget : widget {
    port subscribe region : RegionIn;
    port subscribe rows : RowsIn;
  }
}
"""

DASHBOARD_ARCH = """\
architecture Dashboard : Ozone {
  component map : MapWidget;
  component chart : ChartWidget;
  component table : TableWidget;
}
"""

RESTRICTED_DASHBOARD_ARCH = """\
architecture Dashboard : Ozone {
  component map : MapWidget;
  component chart : ChartWidget;
  component table : TableWidget;
  restrict channel "region" to (map, chart);
}
"""


def style_registry() -> dict[str, Style]:
    registry = {}
    for source in (WORKFLOW_STYLE, DNA_STYLE, NEURO_STYLE, OZONE_STYLE):
        style = style_from_decl(parse_style(source))
        registry[style.name] = style
    return registry


def resolved(name: str) -> ResolvedStyle:
    registry = style_registry()
    return resolve_style(registry[name], registry)


def architecture(source: str, style: ResolvedStyle = None):
    from .model import instantiate
    decl = parse_architecture(source)
    style = style or resolved(decl.style)
    return instantiate(style, decl)


def fig5():
    style = resolved("DNA")
    return architecture(FIG5_ARCH, style), style


def fig7():
    style = resolved("Neuro")
    return architecture(FIG7_ARCH, style), style


def dashboard(restricted: bool = False):
    style = resolved("Ozone")
    source = RESTRICTED_DASHBOARD_ARCH if restricted else DASHBOARD_ARCH
    return architecture(source, style), style


DNA_BINDINGS = {
    "MailExtractor": AdapterBinding(kind="builtin", ref="extract_mail"),
    "DataSource": AdapterBinding(kind="builtin", ref="const_text"),
    "FilterText": AdapterBinding(kind="builtin", ref="filter_text"),
    "Delete": AdapterBinding(kind="builtin", ref="delete_words"),
    "GenerateMetaNetwork": AdapterBinding(kind="builtin", ref="meta_network"),
    "HotTopics": AdapterBinding(kind="builtin", ref="hot_topics"),
}


def neuro_converters() -> ConverterGraph:
    return ConverterGraph(edges=[
        ConverterEdge(converter="Analyze2Nifti", src="Analyze", dst="NIfTI",
                      latency_seconds=1.0, fidelity_loss=0.0),
        ConverterEdge(converter="Nifti2Analyze", src="NIfTI", dst="Analyze",
                      latency_seconds=1.0, fidelity_loss=0.05),
    ])
