from ltqdiag.cli import main

raise SystemExit(main())
