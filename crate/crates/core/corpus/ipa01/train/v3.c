int maior(int p, int q) {
    if (p > q) {
        return p;
    }
    return q;
}

int main() {
    int n1, n2, n3, m;
    scanf("%d %d %d", &n1, &n2, &n3);
    m = maior(n1, n2);
    m = maior(m, n3);
    printf("%d\n", m);
    return 0;
}
