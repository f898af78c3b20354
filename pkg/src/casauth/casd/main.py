"""Command-line entry point for the CAS server daemon."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from ..credential.certs import load_trust_store
from ..credfile import load_credential
from ..errors import CasError
from .config import load_config, split_endpoint
from .db import CommunityDB, load_db, save_db
from .server import serve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casd", description="Community authorization service daemon")
    parser.add_argument("--config", help="key: value config file")
    parser.add_argument("--listen", help="host:port to listen on")
    parser.add_argument("--db", help="community database snapshot path")
    parser.add_argument("--cred", help="server credential file")
    parser.add_argument("--trust", help="trust store file")
    parser.add_argument("--bootstrap-admin", help="identity that always passes admin checks")
    parser.add_argument("--max-lifetime", help="capability lifetime cap in seconds")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(asctime)s %(name)s %(message)s")
    try:
        config = load_config(args.config, {
            "listen": args.listen,
            "db": args.db,
            "cred": args.cred,
            "trust": args.trust,
            "bootstrap-admin": args.bootstrap_admin,
            "max-lifetime": args.max_lifetime,
        })
        if config.cred is None or config.trust is None or config.db is None:
            print("casd: --cred, --trust and --db are required", file=sys.stderr)
            return 5
        chain, leaf_key = load_credential(config.cred)
        anchors = load_trust_store(config.trust)
        if os.path.exists(config.db):
            db = load_db(config.db, anchors)
        else:
            # first boot: start from an empty community and create the snapshot
            db = CommunityDB(trust_anchors=anchors)
            save_db(db, config.db)
        serve(db, split_endpoint(config.listen), (chain, leaf_key), config)
    except KeyboardInterrupt:
        return 0
    except CasError as exc:
        print(f"casd: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
