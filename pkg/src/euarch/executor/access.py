"""Role-based access rules. Default-deny: absence of a matching allow rule
denies the action."""

from __future__ import annotations

from dataclasses import dataclass, field

ACTIONS = ("use", "read", "write")


@dataclass(frozen=True)
class AccessRule:
    principal: str   # user name or role name
    resource: str    # component type id, dataset id, or "*"
    action: str      # use | read | write


@dataclass
class User:
    name: str
    roles: set[str] = field(default_factory=set)

    def principals(self) -> set[str]:
        return {self.name} | set(self.roles)


def authorize(user: User, resource: str, action: str,
              rules: list[AccessRule]) -> bool:
    principals = user.principals()
    for rule in rules:
        if rule.principal in principals \
                and rule.resource in (resource, "*") \
                and rule.action == action:
            return True
    return False
