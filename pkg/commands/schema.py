import argparse
import sys

from schemas import DOCUMENTS
from utils.formatting import dump_json


def register(subparsers) -> None:
    parser = subparsers.add_parser("schema", help="print the JSON schema of an output document")
    parser.add_argument("--model", choices=sorted(DOCUMENTS), default="report")
    parser.set_defaults(handler=cmd_schema)


def cmd_schema(args: argparse.Namespace) -> int:
    sys.stdout.write(dump_json(DOCUMENTS[args.model].model_json_schema(by_alias=True)))
    return 0
