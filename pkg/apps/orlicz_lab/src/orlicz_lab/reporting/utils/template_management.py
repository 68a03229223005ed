from pathlib import Path

import yaml
from jinja2 import Template


TEMPLATES_DIR = Path(__file__).resolve().parent.parent / "templates"


def report_template_config(yaml_file, template_key):
    with open(yaml_file, 'r') as file:
        config = yaml.safe_load(file)
    template_content = config['templates'][template_key]
    template = Template(template_content, trim_blocks=True, lstrip_blocks=True)
    return template


def summary_template():
    return report_template_config(TEMPLATES_DIR / "summary.yaml", "run_summary")
